"""Benchmark of model checking on social network models against their Kripke models."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from os.path import dirname, isabs, join
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

from .. import kripke
from ..check_config import CheckConfig
from ..errors import ConfigurationError, ResourceExhaustedError
from ..utils import parse_formula, read_model
from .canonical import DEFAULT_GUARD
from .cost import cost_report
from .generate import random_corpus
from .syntax import ground
from .translate import kt

__all__ = ["BenchSuite", "run_bench"]

logger = logging.getLogger(__name__)


@dataclass
class BenchSuite:
    """Generator parameters and example files of a benchmark.

    ``examples`` lists ``(model file, [formula, ...])`` pairs that are run
    before the generated corpus.
    """

    seed: int = 42
    n_models: int = 10
    n_formulas: int = 5
    n_agents: int = 2
    n_atoms: int = 3
    kb_size: int = 2
    depth: int = 1
    formula_depth: int = 2
    p_relation: float = 0.3
    guard: int = DEFAULT_GUARD
    parallel: bool = False
    examples: List[Tuple[str, List[str]]] = field(default_factory=list)

    @staticmethod
    def from_dict(config: Dict, root: str = None) -> "BenchSuite":
        """Create a suite from the ``suite`` and ``examples`` entries of a dict.

        Relative model paths are read relative to ``root``.
        """
        known = {f.name for f in fields(BenchSuite)} - {"examples"}
        options = dict(config.get("suite") or {})
        unknown = set(options) - known
        if unknown:
            raise ConfigurationError(
                f"Unknown bench setting(s): {', '.join(sorted(unknown))}."
            )
        examples = []
        for entry in config.get("examples") or []:
            path = entry["model"]
            if root is not None and not isabs(path):
                path = join(root, path)
            examples.append((path, list(entry.get("formulas", []))))
        return BenchSuite(examples=examples, **options)

    @staticmethod
    def from_yaml(fn: str) -> "BenchSuite":
        """Create a suite from a YAML file."""
        with open(fn, "r") as f:
            config = yaml.safe_load(f) or {}
        return BenchSuite.from_dict(config, root=dirname(fn))

    def cases(self, logger=logger):
        """Yield ``(source, model, formula)`` for the examples and the corpus."""
        for path, formulas in self.examples:
            snm = read_model(path, logger=logger)
            for text in formulas:
                yield path, snm, parse_formula(text, snm.vocab)
        corpus = random_corpus(
            self.seed,
            self.n_models,
            self.n_formulas,
            formula_depth=self.formula_depth,
            n_agents=self.n_agents,
            n_atoms=self.n_atoms,
            kb_size=self.kb_size,
            depth=self.depth,
            p_relation=self.p_relation,
        )
        for k, (snm, formulas) in enumerate(corpus):
            for phi in formulas:
                yield f"seed{self.seed}-{k}", snm, phi


def _kripke_side(snm, phi, m: Optional[kripke.KripkeModel]) -> Dict:
    if m is None:
        return {
            "kripke_verdict": None,
            "kripke_seconds": np.nan,
            "guard_exceeded": True,
        }
    phi_k = ground(snm.vocab.resolve(phi), snm.vocab)
    start = time.perf_counter()
    holds = kripke.kripke_sat(m, m.distinguished, phi_k)
    return {
        "kripke_verdict": "true" if holds else "false",
        "kripke_seconds": time.perf_counter() - start,
        "guard_exceeded": False,
    }


def run_bench(
    suite: BenchSuite, cfg: CheckConfig = None, logger=logger
) -> pd.DataFrame:
    """Run a benchmark suite.

    Each row holds the symbolic costs of one formula on one model, the
    verdict and time of the check on the model, and the verdict and time of
    the check at the distinguished state of the model's canonical Kripke
    model. Rows whose characteristic formula exceeds the guard are kept with
    ``guard_exceeded`` set.

    Parameters
    ----------
    suite: BenchSuite
        Generator parameters and example files.
    cfg: CheckConfig, optional
        Settings of the model checks.

    Returns
    -------
    pandas.DataFrame
        One row per formula, indexed by row number.
    """
    cfg = cfg or CheckConfig()
    cases = list(suite.cases(logger=logger))
    translated: Dict[int, Optional[kripke.KripkeModel]] = {}
    for _, snm, _ in cases:
        if id(snm) in translated:
            continue
        try:
            translated[id(snm)] = kt(snm, guard=suite.guard, budget=cfg.step_budget)
        except ResourceExhaustedError as err:
            logger.warning(f"Kripke side skipped: {err}")
            translated[id(snm)] = None

    def row(case):
        source, snm, phi = case
        report = cost_report(snm, phi, cfg, logger=logger)
        out = {
            "source": source,
            "formula": report.formula,
            "outer_k": len(report.outer),
            "formula_size": report.formula_size,
            "characteristic_size": report.characteristic_size,
            "snm_steps": report.snm_steps,
            "kripke_steps": report.kripke_steps,
            "snm_bound": report.snm_bound,
            "kripke_bound": report.kripke_bound,
            "bound_holds": report.bound_holds,
            "verdict": report.verdict,
            "snm_seconds": report.seconds,
        }
        out.update(_kripke_side(snm, phi, translated[id(snm)]))
        return out

    if suite.parallel:
        with ThreadPoolExecutor() as pool:
            rows = list(pool.map(row, cases))
    else:
        rows = [row(case) for case in cases]
    df = pd.DataFrame(rows)
    df.index.name = "row"
    failed = df["bound_holds"].eq(False).sum() if len(df) else 0
    logger.info(f"Bench of {len(df)} rows, {failed} bound violations.")
    return df

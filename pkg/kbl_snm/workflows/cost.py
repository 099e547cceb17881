"""Checking cost of a formula on a social network model and on its Kripke model."""

import logging
import time
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

from ..check_config import CheckConfig
from .checker import evaluate, outer_k
from .syntax import Formula, conjoin, expand_derived, ground, size, to_text

__all__ = ["CostReport", "kb_size", "characteristic_size", "cost_report"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CostReport:
    """Symbolic checking costs of one formula on one model.

    ``snm_steps`` and ``kripke_steps`` are the additive step counts
    ``sum 2^|kb_i| + m`` and ``2^|characteristic| + m``; ``snm_bound`` and
    ``kripke_bound`` are the multiplicative bounds
    ``sum 2^|kb_i| * |phi_i|`` and ``2^|characteristic| * |phi|`` that are
    compared by :py:attr:`bound_holds`. ``m_phi`` is the node cost times ``|phi|``.
    """

    formula: str
    formula_size: int
    outer: Tuple[str, ...]
    kb_sizes: Dict[str, int]
    m_phi: int
    snm_steps: int
    kripke_steps: int
    snm_bound: int
    kripke_bound: int
    characteristic_size: int
    verdict: Optional[str] = None
    seconds: Optional[float] = None

    @property
    def bound_holds(self) -> Optional[bool]:
        """True if the model bound is strictly below the Kripke bound; None
        when no knowledge subformula is outside another modality."""
        if not self.outer:
            return None
        return self.snm_bound < self.kripke_bound

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["outer"] = list(self.outer)
        out["bound_holds"] = self.bound_holds
        return out


def kb_size(kb) -> int:
    """Size of the conjunction of a knowledge base; 0 when it is empty."""
    if len(kb) == 0:
        return 0
    return size(conjoin(kb.formulas))


def characteristic_size(snm) -> int:
    """Size measure of the characteristic formula of a model.

    The sum of the knowledge base sizes of all agents plus the sizes of the
    environment atoms and of every connection and action atom.
    """
    total = sum(kb_size(snm.kb(a)) for a in snm.agents)
    total += sum(size(p) for p in snm.environment)
    for rels in (snm.connections, snm.actions):
        # a binary relation atom counts its symbol and two arguments
        total += 3 * sum(len(pairs) for pairs in rels.values())
    return total


def cost_report(snm, phi: Formula, cfg=None, run_check: bool = True, logger=logger):
    """Compute the symbolic checking costs of phi on snm and time the check.

    The formula is grounded and E and S are expanded before measuring, so
    the knowledge subformulas outside any other modality are those the
    checker sends to the prover.

    Parameters
    ----------
    snm: SocialNetworkModel
        Model to check.
    phi: Formula
        Closed formula.
    cfg: CheckConfig, optional
        Provides ``node_cost`` and the settings of the timed check.
    run_check: bool, optional
        If False, only the symbolic costs are computed.

    Returns
    -------
    CostReport
        Symbolic costs with the verdict and wall time of the check.
    """
    cfg = cfg or CheckConfig()
    phi_k = expand_derived(ground(snm.vocab.resolve(phi), snm.vocab))
    members = sorted(outer_k(phi_k), key=to_text)
    kb_sizes = {f.agent: kb_size(snm.kb(f.agent)) for f in members}
    phi_size = size(phi_k)
    m_phi = cfg.node_cost * phi_size
    char_size = characteristic_size(snm)
    snm_steps = sum(2 ** kb_sizes[f.agent] for f in members) + m_phi
    snm_bound = sum(2 ** kb_sizes[f.agent] * size(f.body) for f in members)
    verdict, seconds = None, None
    if run_check:
        start = time.perf_counter()
        verdict = evaluate(snm, phi, cfg, logger=logger).value
        seconds = time.perf_counter() - start
    report = CostReport(
        formula=to_text(phi),
        formula_size=phi_size,
        outer=tuple(to_text(f) for f in members),
        kb_sizes=kb_sizes,
        m_phi=m_phi,
        snm_steps=snm_steps,
        kripke_steps=2**char_size + m_phi,
        snm_bound=snm_bound,
        kripke_bound=2**char_size * phi_size,
        characteristic_size=char_size,
        verdict=verdict,
        seconds=seconds,
    )
    logger.debug(f"{report.formula}: {report.snm_steps} vs {report.kripke_steps} steps")
    return report

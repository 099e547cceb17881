"""
CheckConfig class to read and write model checking settings (``key = value`` files).
"""

from ast import literal_eval
from typing import Any, Dict

from .errors import ConfigurationError
from .workflows.canonical import DEFAULT_GUARD
from .workflows.deduction import default_step_budget

__all__ = ["CheckConfig"]


class CheckConfig:
    def __init__(self):
        """Initialize CheckConfig class with default values"""
        self.common_bound = 4
        self.step_budget = default_step_budget()
        self.canonical_guard = DEFAULT_GUARD
        self.trace = False
        self.parallel = False
        self.node_cost = 1

    def read(self, config_fn: str) -> None:
        """Read a settings file and set attributes to values in file."""
        with open(config_fn, "r") as fid:
            lines = fid.readlines()

        for line in lines:
            line = line.split("#", 1)[0]
            line = [x.strip() for x in line.split("=")]
            if len(line) != 2:  #  Empty or unrecognized line
                continue
            name, val = line
            try:
                val = literal_eval(val)
            except Exception:  # normal string
                pass
            self[name] = val
        self.validate()

    def write(self, config_fn: str) -> None:
        """Write settings file from attributes."""
        with open(config_fn, "w") as fid:
            for key, value in self.__dict__.items():
                fid.write(f"{key.ljust(20)} = {value}\n")

    def validate(self) -> None:
        """Raise a ConfigurationError if a setting is out of range."""
        for name in ["common_bound", "step_budget", "canonical_guard", "node_cost"]:
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigurationError(
                    f'"{name} = {value}" must be a positive integer.'
                )
        for name in ["trace", "parallel"]:
            if not isinstance(getattr(self, name), bool):
                raise ConfigurationError(
                    f'"{name} = {getattr(self, name)}" must be True or False.'
                )

    @staticmethod
    def from_dict(config_dict: Dict) -> "CheckConfig":
        """Create CheckConfig object from dictionary."""
        config = CheckConfig()
        for name, val in config_dict.items():
            config[name] = val
        config.validate()
        return config

    @staticmethod
    def from_file(config_fn: str) -> "CheckConfig":
        """Create CheckConfig object from settings file."""
        config = CheckConfig()
        config.read(config_fn)
        return config

    def to_dict(self) -> Dict:
        """Return dictionary of attributes."""
        return dict(self.__dict__)

    def __getitem__(self, name: str) -> Any:
        """Return attribute value."""
        return getattr(self, name)

    def __setitem__(self, name: str, value: Any) -> None:
        """Set attribute value of a known setting."""
        if name not in self.__dict__:
            raise ConfigurationError(f"Unknown setting '{name}'.")
        setattr(self, name, value)

    def __repr__(self) -> str:
        """Return string representation of object."""
        return f"{self.__class__.__name__}({self.to_dict()})"

    def __eq__(self, __value: object) -> bool:
        """Return True if objects are equal."""
        if isinstance(__value, self.__class__):
            return self.__dict__ == __value.__dict__
        return False

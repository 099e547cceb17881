"""Logging setup for the kbl command line.

Mirrors :py:func:`hydromt.log.setuplog`: one stream handler on stderr and an
optional file handler, both sharing a single format and level.
"""

import logging
import sys

from . import __version__

FMT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

__all__ = ["setuplog"]


def setuplog(
    name: str = "kbl_snm",
    path: str = None,
    log_level: int = 20,
    fmt: str = FMT,
    append: bool = True,
) -> logging.Logger:
    """Set up the logging on sys.stderr and an optional file.

    Parameters
    ----------
    name : str, optional
        Logger name, by default "kbl_snm"
    path : str, optional
        Path to logfile, by default None
    log_level : int, optional
        Log level [0-50], by default 20 (info)
    fmt : str, optional
        Log message formatter, by default {FMT}
    append : bool, optional
        Wether to append (True) or overwrite (False) to a logfile at path,
        by default True

    Returns
    -------
    logging.Logger
        Logger with stream (and file) handlers attached.
    """
    logger = logging.getLogger(name)
    for _ in range(len(logger.handlers)):
        logger.handlers.pop().close()
    logger.setLevel(log_level)
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(log_level)
    console.setFormatter(logging.Formatter(fmt))
    logger.addHandler(console)
    if path is not None:
        filehandler = logging.FileHandler(path, mode="a" if append else "w")
        filehandler.setLevel(log_level)
        filehandler.setFormatter(logging.Formatter(fmt))
        logger.addHandler(filehandler)
    logger.debug(f"kbl_snm version: {__version__}")
    return logger

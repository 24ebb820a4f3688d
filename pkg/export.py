"""Write experiment tables and their metadata sidecars."""
from __future__ import annotations

import logging
import os
from typing import Mapping

import pandas as pd

from setup_system import RUN_SECTION, SystemConfig, config_to_sections, write_ini

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"


def csv_text(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def meta_text(run: Mapping[str, str], cfg: SystemConfig) -> str:
    """[run] first, then the effective configuration in full"""
    sections = {RUN_SECTION: dict(run)}
    sections.update(config_to_sections(cfg))
    return write_ini(sections)


def _write(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info("wrote %s", path)
    return path


def write_csv(frame: pd.DataFrame, out_dir: str, command: str) -> str:
    """Save `frame` as <command>.csv in `out_dir`."""
    return _write(os.path.join(out_dir, f"{command}.csv"), csv_text(frame))


def write_meta(run: Mapping[str, str], cfg: SystemConfig, out_dir: str, command: str) -> str:
    return _write(os.path.join(out_dir, f"{command}.meta"), meta_text(run, cfg))

"""
Deterministic JSON/CSV artifact writers

Artifacts are written to a temporary file in the target directory and renamed
into place, so a reader never sees a partial file. Output depends only on the
payload: keys are sorted and no timestamps are added.
"""
import json
import logging
import os
import tempfile
from datetime import date
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def to_jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return {str(k): to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(v) for v in payload]
    if isinstance(payload, date):
        return payload.isoformat()
    if isinstance(payload, np.generic):
        return payload.item()
    return payload


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"Wrote {path}")
    return path


def write_json(path: PathLike, payload: Any, config: Optional[Dict[str, Any]] = None) -> Path:
    """JSON document; config, when given, is embedded under 'config'"""
    document = to_jsonable(payload)
    if config is not None:
        if not isinstance(document, dict):
            document = {"result": document}
        document = {"config": to_jsonable(config), **document}
    return write_atomic(path, dumps(document))


def write_csv(path: PathLike, frame: pd.DataFrame, config: Optional[Dict[str, Any]] = None) -> Path:
    """CSV table; config, when given, goes in a leading '# config=' comment line"""
    header = ""
    if config is not None:
        header = "# config=" + json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":")) + "\n"
    body = frame.to_csv(index=False, lineterminator="\n")
    return write_atomic(path, header + body)


def read_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)

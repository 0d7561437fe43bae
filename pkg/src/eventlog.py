import json
import sys
from typing import Any


def emit(event_type: str, **fields: Any) -> None:
    """
    Print one JSON log record to stderr.

    Stdout is reserved for command results.

    Args:
        event_type: record name, e.g. "OrbitsComputed"
        **fields: JSON-serializable payload
    """
    record = {"event_type": event_type}
    record.update(fields)
    print(json.dumps(record, default=str), file=sys.stderr)

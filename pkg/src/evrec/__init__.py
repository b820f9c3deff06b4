"""evrec: windowed recognition of composite events over revisable streams."""

from .intervals import (
    OPEN,
    IntervalList,
    IntervalOverlapError,
    MalformedIntervalError,
    amalgamate,
    clip_before,
    holds_at,
    intersect_all,
    make_intervals,
    normalize,
    relative_complement_all,
    union_all,
)
from .language import (
    Diagnostic,
    EventDescription,
    RuleSyntaxError,
    StratificationError,
    expand,
    load,
    parse,
    pretty,
    stratify,
    validate,
)
from .engine import (
    Engine,
    EngineConfig,
    EvaluationError,
    RecognitionResult,
    ResultEntry,
    run_stream,
)
from .streams import (
    DelayModel,
    InputRecord,
    StreamFormatError,
    closeness,
    fill_auto_domains,
    read_stream,
    simulate_delays,
    write_results,
    write_stream,
)

__version__ = "0.1.0"

__all__ = [
    "OPEN",
    "IntervalList",
    "IntervalOverlapError",
    "MalformedIntervalError",
    "amalgamate",
    "clip_before",
    "holds_at",
    "intersect_all",
    "make_intervals",
    "normalize",
    "relative_complement_all",
    "union_all",
    "Diagnostic",
    "EventDescription",
    "RuleSyntaxError",
    "StratificationError",
    "expand",
    "load",
    "parse",
    "pretty",
    "stratify",
    "validate",
    "Engine",
    "EngineConfig",
    "EvaluationError",
    "RecognitionResult",
    "ResultEntry",
    "run_stream",
    "DelayModel",
    "InputRecord",
    "StreamFormatError",
    "closeness",
    "fill_auto_domains",
    "read_stream",
    "simulate_delays",
    "write_results",
    "write_stream",
]

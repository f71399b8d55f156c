from ._core import (
    ConfigError,
    EmptyMessage,
    Error,
    __version__,
    evaluate,
    mask_message,
    mask_token,
    normalize_template,
    parse,
    pos_jaccard,
    post_process,
    route,
    select_threshold,
    singleton_ratio,
)

__all__ = [
    "ConfigError",
    "EmptyMessage",
    "Error",
    "__version__",
    "evaluate",
    "mask_message",
    "mask_token",
    "normalize_template",
    "parse",
    "pos_jaccard",
    "post_process",
    "route",
    "select_threshold",
    "singleton_ratio",
]

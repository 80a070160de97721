"""Service layer: pydantic models, pure handlers, and the FastAPI app."""

from .app import create_app
from .handlers import (
    HANDLERS,
    do_classify,
    do_construct,
    do_oracle,
    do_report,
    do_verify,
    rebuild_construction,
)

__all__ = [
    "HANDLERS",
    "create_app",
    "do_classify",
    "do_construct",
    "do_oracle",
    "do_report",
    "do_verify",
    "rebuild_construction",
]

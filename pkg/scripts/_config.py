"""Turn a dataclass of defaults into command-line flags."""
from __future__ import annotations

import argparse
import dataclasses
from typing import TypeVar

T = TypeVar("T")


def parse_config(cls: type[T], description: str = "", argv=None) -> T:
    parser = argparse.ArgumentParser(description=description)
    for field in dataclasses.fields(cls):
        flag = "--" + field.name.replace("_", "-")
        kind = type(field.default)
        if kind is bool:
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=field.default)
        else:
            parser.add_argument(flag, type=kind, default=field.default)
    return cls(**vars(parser.parse_args(argv)))

import math
import re
from typing import Tuple

from app.enums import ScanParameter
from app.exceptions import InvalidParameterError
from app.schemas import ScanAxis

ANGLE_PATTERN = re.compile(
    r"(?P<sign>[+-]?)(?P<factor>\d+(?:\.\d*)?|\.\d+)?\*?(?:pi|π)(?:/(?P<divisor>\d+(?:\.\d*)?))?"
)


def parse_angle(text: str | float) -> float:
    """
    Radians, either as a number or as a multiple of pi: "pi", "pi/2",
    "-pi/4", "3pi/4", "2*pi/3".
    """
    if isinstance(text, (int, float)):
        return float(text)
    compact = text.strip().lower().replace(" ", "")
    try:
        return float(compact)
    except ValueError:
        pass
    match = ANGLE_PATTERN.fullmatch(compact)
    if match is None:
        raise InvalidParameterError(f"cannot read {text!r} as an angle")
    factor = float(match["factor"] or 1.0)
    divisor = float(match["divisor"] or 1.0)
    if divisor == 0:
        raise InvalidParameterError(f"division by zero in angle {text!r}")
    value = factor * math.pi / divisor
    return -value if match["sign"] == "-" else value


def _parameter(name: str) -> ScanParameter:
    try:
        return ScanParameter(name.strip().lower())
    except ValueError:
        choices = ", ".join(parameter.value for parameter in ScanParameter)
        raise InvalidParameterError(
            f"unknown parameter {name!r}, expected one of {choices}"
        ) from None


def _split(text: str) -> Tuple[ScanParameter, str]:
    name, separator, body = text.partition("=")
    if not separator or not body.strip():
        raise InvalidParameterError(f"expected name=value, got {text!r}")
    return _parameter(name), body.strip()


def parse_axis(text: str) -> ScanAxis:
    """
    "name=min:max:steps" for an inclusive linear grid, or "name=v1,v2,...".
    """
    parameter, body = _split(text)
    if ":" in body:
        parts = body.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(f"expected min:max:steps, got {body!r}")
        try:
            steps = int(parts[2])
        except ValueError:
            raise InvalidParameterError(f"steps must be an integer, got {parts[2]!r}") from None
        return ScanAxis(
            parameter=parameter,
            start=parse_angle(parts[0]),
            stop=parse_angle(parts[1]),
            steps=steps,
        )
    return ScanAxis(
        parameter=parameter,
        values=[parse_angle(part) for part in body.split(",") if part.strip()],
    )


def parse_assignment(text: str) -> Tuple[ScanParameter, float]:
    parameter, body = _split(text)
    return parameter, parse_angle(body)

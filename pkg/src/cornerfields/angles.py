"""Interior angles stored exactly as rational multiples of pi when possible."""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ValidationError

TWO_PI = 2.0 * math.pi

_PI_FORM = re.compile(
    r"^\s*(?P<num>[+-]?\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d+)?))?\s*$"
)


@dataclass(frozen=True)
class Angle:
    """An angle in radians, remembering ``pi_multiple`` when it is rational."""

    radians: float
    pi_multiple: Optional[Fraction] = None

    @classmethod
    def from_pi(cls, multiple):
        multiple = Fraction(multiple)
        return cls(float(multiple) * math.pi, multiple)

    @classmethod
    def parse(cls, text):
        """Accepts ``3pi/2``, ``3*pi/2``, ``pi``, ``0.5pi`` or plain radians."""
        if isinstance(text, Angle):
            return text
        if isinstance(text, (int, float, Fraction)):
            return cls(float(text))
        m = _PI_FORM.match(text)
        if m:
            num = Fraction(m.group("num")) if m.group("num") else Fraction(1)
            den = Fraction(m.group("den")) if m.group("den") else Fraction(1)
            if den == 0:
                raise ValidationError(f"zero denominator in angle {text!r}")
            return cls.from_pi(num / den)
        try:
            return cls(float(text))
        except ValueError:
            raise ValidationError(f"cannot parse angle {text!r}") from None

    def __float__(self):
        return self.radians

    @property
    def exact(self):
        return self.pi_multiple is not None

    def text(self):
        """Canonical text form; ``Angle.parse(a.text()) == a``."""
        if self.pi_multiple is None:
            return repr(self.radians)
        num, den = self.pi_multiple.numerator, self.pi_multiple.denominator
        head = "pi" if num == 1 else ("-pi" if num == -1 else f"{num}pi")
        return head if den == 1 else f"{head}/{den}"

    def __str__(self):
        return self.text()


def as_angle(omega: Union[Angle, float, str]) -> Angle:
    return Angle.parse(omega)


def check_interior_angle(omega):
    """Return ``omega`` as an :class:`Angle` after checking it lies in (0, 2pi]."""
    a = as_angle(omega)
    if a.exact:
        ok = 0 < a.pi_multiple <= 2
    else:
        ok = 0.0 < a.radians <= TWO_PI
    if not ok:
        raise ValidationError(f"omega must lie in (0, 2pi], got {a.text()}")
    return a

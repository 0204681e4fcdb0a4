"""Enumeration of cubic fields through binary cubic forms, with checks of the
main and secondary terms in their counting functions."""

__version__ = "0.1.0"

__all__ = [
    "forms",
    "maximality",
    "enumeration",
    "census",
    "classgroups",
    "hough",
    "asymptotics",
    "cli",
]

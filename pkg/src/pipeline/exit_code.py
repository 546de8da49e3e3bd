from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    INVALID_INPUT = 1
    PARTIAL_FAILURE = 2
    MISSING_PAIRS = 3

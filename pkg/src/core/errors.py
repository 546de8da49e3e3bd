class SizeMismatchError(ValueError):
    def __init__(self, what: str, expected: tuple[int, int], actual: tuple[int, int]):
        super().__init__(
            f"{what}: expected {expected[0]}x{expected[1]}, got {actual[0]}x{actual[1]}"
        )
        self.expected = expected
        self.actual = actual


class DegenerateRangeError(ValueError):
    pass


class ConditioningError(ValueError):
    pass


class NegativeFieldError(ValueError):
    pass


class FieldFormatError(ValueError):
    def __init__(
        self,
        message: str,
        offset: int,
        expected: int | None = None,
        actual: int | None = None,
    ) -> None:
        details = f"{message} (at byte {offset}"
        if expected is not None and actual is not None:
            details += f", expected {expected} bytes, got {actual}"
        super().__init__(details + ")")
        self.offset = offset
        self.expected = expected
        self.actual = actual


class ConfigError(ValueError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InputError(ValueError):
    pass

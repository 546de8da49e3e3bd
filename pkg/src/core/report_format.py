from enum import StrEnum


class ReportFormat(StrEnum):
    TEXT = "text"
    JSON = "json"

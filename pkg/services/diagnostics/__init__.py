from .fixture_check import CheckStatus, OracleCheck, FixtureReport, check_fixture, summarize

__all__ = ["CheckStatus", "OracleCheck", "FixtureReport", "check_fixture", "summarize"]

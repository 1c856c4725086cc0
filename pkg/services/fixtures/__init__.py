from .examples import (
    FIXTURE_NAMES,
    ExampleFixture,
    Factor,
    FactorizationCheck,
    SupportCheck,
    example1_split,
    example2_evaluator,
    make_fixture,
    parse_parameters,
    verify_factorization,
)

__all__ = [
    "FIXTURE_NAMES", "ExampleFixture", "Factor", "FactorizationCheck", "SupportCheck",
    "example1_split", "example2_evaluator", "make_fixture", "parse_parameters",
    "verify_factorization",
]

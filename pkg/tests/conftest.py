import pytest

from revca.rulespace import RuleParams, parse_rule, rule_from_decimal

# paper anchors used across the suite
FIG2_RULE = "012012120012210102201021102"  # balanced 3-state rule, reversible at n=3
FIG3B_RULE = "222211112001000000110122221"  # irreversible at n=3
TABLE1_ROW3 = FIG2_RULE


def pytest_addoption(parser):
    parser.addoption(
        "--run-long",
        action="store_true",
        default=False,
        help="run the long family sweeps (all 65536 d=2, m=4 rules)",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "long: long-running full-family sweeps")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-long"):
        return
    skip = pytest.mark.skip(reason="pass --run-long to enable")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def eca_params():
    return RuleParams(d=2, m=3)


@pytest.fixture(scope="session")
def params33():
    return RuleParams(d=3, m=3)


def eca(value: int):
    return rule_from_decimal(value, RuleParams(d=2, m=3))


def rule33(text: str):
    return parse_rule(text, RuleParams(d=3, m=3))

"""
Test configuration and fixtures
"""

import numpy as np
import pytest
from click.testing import CliRunner
from sympy import ImmutableMatrix

from isodual import create_app
from isodual.cli import cli
from isodual.services.verification_service import VerificationService


@pytest.fixture(scope="session")
def app():
    """Create application for testing"""
    return create_app("testing")


@pytest.fixture(scope="session")
def catalog(app):
    """Catalog service shared across the session"""
    return app.catalog


@pytest.fixture(scope="session")
def verifier(app, catalog):
    return VerificationService(catalog, app.config)


@pytest.fixture
def runner():
    """Create test CLI runner"""
    return CliRunner()


@pytest.fixture
def invoke(runner):
    """Run the command group under the testing profile"""

    def _invoke(*args):
        return runner.invoke(cli, ["--config", "testing", *args])

    return _invoke


@pytest.fixture
def f2():
    """F_2, the order-6 type of rank 2"""
    return ImmutableMatrix([[1, -1], [0, 1]])


@pytest.fixture
def j2():
    return ImmutableMatrix([[0, 1], [-1, 0]])


@pytest.fixture
def not_isodual():
    """Unimodular, but R has infinite order"""
    return ImmutableMatrix([[1, 2], [0, 1]])


@pytest.fixture
def hexagonal():
    """A_2 scaled to determinant 1"""
    return np.array([[2.0, -1.0], [-1.0, 2.0]]) / np.sqrt(3.0)

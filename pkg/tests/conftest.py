import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from jmf.formspec import kac_wakimoto, make_form, shifted_pole_form  # noqa: E402
from jmf.numerics import TorsionPoint  # noqa: E402

FORMS = os.path.join(os.path.dirname(__file__), "..", "demos", "forms")


@pytest.fixture(scope="session")
def kw42():
    return kac_wakimoto(4, 2)


@pytest.fixture(scope="session")
def kw64():
    return kac_wakimoto(6, 4)


@pytest.fixture(scope="session")
def shifted():
    return shifted_pole_form()


@pytest.fixture(scope="session")
def theta_sq():
    return make_form([(TorsionPoint(0, 0), 2)], name="theta_squared")


@pytest.fixture(scope="session")
def forms_dir():
    return os.path.abspath(FORMS)

import mpmath
import pytest
from hypothesis import settings

from oracles import PI_DIGITS_50

PI_DIGITS = 10**6

# Example cost grows with period length; wall-clock deadlines only add flakiness.
settings.register_profile("normality", deadline=None)
settings.load_profile("normality")


@pytest.fixture(scope="session")
def pi_file(tmp_path_factory):
    """Digit file holding 3. followed by the first 10**6 decimals of pi."""
    with mpmath.workdps(PI_DIGITS + 30):
        text = mpmath.nstr(mpmath.pi, PI_DIGITS + 20, strip_zeros=False)
    text = text[: PI_DIGITS + 2]
    assert text[2:52] == PI_DIGITS_50
    path = tmp_path_factory.mktemp("pi") / "pi.txt"
    path.write_text("# base=10\n" + text + "\n")
    return path

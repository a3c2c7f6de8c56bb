import pytest

from squeezed_fisher.states import InterferometerInput


def pytest_addoption(parser):
    parser.addoption(
        "--crb-repeats",
        action="store",
        type=int,
        default=200,
        help="Repeats used by the Monte Carlo Cramer-Rao checks",
    )


@pytest.fixture
def crb_repeats(request):
    return request.config.getoption("--crb-repeats")


@pytest.fixture
def balanced_input():
    """
    Factory for phase-matched inputs with alpha^2 = sinh^2|xi| = n_bar / 2
    """
    return InterferometerInput.balanced


@pytest.fixture
def run_cli(tmp_path):
    """
    Run the squeezed-fisher commandline in a scratch directory
    """
    import subprocess

    def run(*args, check=False):
        cmd = ["squeezed-fisher", *[str(a) for a in args]]
        proc = subprocess.run(
            cmd, cwd=tmp_path, encoding="utf-8", capture_output=True, text=True
        )
        if check:
            assert proc.returncode == 0, proc.stdout + proc.stderr
        return proc

    return run

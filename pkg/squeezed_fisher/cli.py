import logging
import sys

from traitlets.config import Application

from .commands.cfi import Cfi
from .commands.crb import Crb
from .commands.fig1 import Fig1
from .commands.fig2 import Fig2
from .commands.fig3 import Fig3
from .commands.qfi import Qfi
from .commands.table1 import Table1
from .errors import exit_code_for


class App(Application):
    """
    squeezed-fisher CLI

    Computes Fisher information of a coherent plus squeezed-vacuum
    interferometer through various subcommands
    """

    raise_config_file_errors = True

    subcommands = {
        "table1": (Table1, "Optimal ratios, NOON fidelity and QFI per photon number"),
        "fig1": (Fig1, "Beam-splitter distributions and per-N optima"),
        "fig2": (Fig2, "Photon-number weights, QFI over the split and optimal splits"),
        "fig3": (Fig3, "QFI retained at finite photon-number resolution"),
        "qfi": (Qfi, "Finite-resolution QFI report for one input"),
        "cfi": (Cfi, "Output distribution and classical Fisher information for one N"),
        "crb": (Crb, "Monte Carlo Cramer-Rao bound check"),
    }

    def start(self):
        self.parse_command_line()
        super().start()


def main():
    app = App()
    try:
        app.start()
    except Exception as e:
        code = exit_code_for(e)
        if code == 1:
            raise
        logging.getLogger().error(
            f"{type(e).__name__}: {e}",
            extra={"status": "failed", "exit_code": code},
        )
        sys.exit(code)

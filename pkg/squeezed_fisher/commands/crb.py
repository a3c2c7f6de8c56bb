import math

from traitlets import Enum, Float, Unicode

from ..montecarlo import crb_experiment
from .base import BaseCommand, common_aliases, common_flags


class Crb(BaseCommand):
    """
    Monte Carlo check of the Cramer-Rao bound with maximum-likelihood
    phase estimation. Writes a JSON record that includes the seed.
    """

    command_name = "crb"

    aliases = common_aliases
    flags = common_flags

    format = Enum(
        ("json",),
        default_value="json",
        config=True,
        help="""
        Output format; Monte Carlo records are JSON only
        """,
    )

    n_bar = Float(
        2.0,
        allow_none=True,
        config=True,
        help="""
        Mean photon number of the input, balanced unless alpha_sq is given
        """,
    )

    n_res = Unicode(
        "20",
        config=True,
        help="""
        Largest total photon number the detectors resolve, or "inf"
        """,
    )

    def parameters(self):
        return {
            **self.input_parameters(),
            "phi": self.phi if self.phi is not None else math.pi / 4,
            "shots": self.shots,
            "n_res": self.n_res_parameter,
            "repeats": self.repeats,
            "seed": self.seed,
            "workers": self.workers,
            "max_twice_j": self.max_twice_j,
        }

    def compute(self, config):
        params = config.parameters
        run = crb_experiment(
            self.build_input(),
            phi=params["phi"],
            shots=params["shots"],
            n_res=self.n_res_value,
            repeats=params["repeats"],
            seed=params["seed"],
            workers=params["workers"],
            max_twice_j=self.max_twice_j,
        )
        return run.to_dict()

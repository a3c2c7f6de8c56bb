from ..errors import InvalidParameterError
from ..fisher import component_cfi, probability_derivative
from ..nphoton_analysis import component_qfi
from ..special_fn import twice_m_values
from ..tables import PanelDocument
from .base import BaseCommand, common_aliases, common_flags


class Cfi(BaseCommand):
    """
    Output distribution P_N(mu|phi), its phase derivative, and the classical
    Fisher information of one N-photon component.

    --x defaults to the ratio of the input given by --n-bar / --alpha-sq / --xi.
    """

    command_name = "cfi"

    aliases = common_aliases
    flags = common_flags

    def parameters(self):
        x = self.x
        if x is None and (self.n_bar is not None or self.xi is not None):
            x = self.build_input().x
        if self.n is None or x is None or self.phi is None:
            raise InvalidParameterError("cfi needs --n, --phi and either --x or an input state")
        return {"n": self.n, "x": x, "phi": self.phi, "max_twice_j": self.max_twice_j}

    def compute(self, config):
        n, x, phi = (config.parameters[k] for k in ("n", "x", "phi"))
        probs, derivative = probability_derivative(n, x, phi, self.max_twice_j)
        mu = twice_m_values(n) / 2

        doc = PanelDocument(config.command, config.parameters)
        doc.add_panel(
            "outcomes", ["mu", "P", "dP_dphi"], list(zip(mu, probs, derivative))
        )
        doc.add_panel(
            "summary",
            ["N", "x", "phi", "cfi", "qfi"],
            [
                (
                    n,
                    x,
                    phi,
                    component_cfi(n, x, phi, self.max_twice_j),
                    component_qfi(n, x, method="amplitudes"),
                )
            ],
        )
        return doc

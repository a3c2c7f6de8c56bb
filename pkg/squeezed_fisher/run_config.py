import json

import jsonschema
from traitlets import Dict, Enum, HasTraits, TraitError, Unicode, validate

COMMANDS = ("table1", "fig1", "fig2", "fig3", "qfi", "cfi", "crb")

n_res_schema = {
    "oneOf": [
        {"type": "integer", "minimum": 0},
        {"const": "inf"},
    ]
}

# Ranges every parameter must fall in, whichever command uses it
parameter_schemas = {
    "n_bar": {"type": "number", "exclusiveMinimum": 0},
    "alpha_sq": {"type": "number", "minimum": 0},
    "xi": {"type": "number", "minimum": 0},
    "theta_a": {"type": "number"},
    "theta_b": {"type": "number"},
    "n": {"type": "integer", "minimum": 0},
    "x": {"type": "number", "minimum": 0},
    "phi": {"type": "number"},
    "n_res": n_res_schema,
    "shots": {"type": "integer", "minimum": 1},
    "repeats": {"type": "integer", "minimum": 2},
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    "workers": {"type": "integer", "minimum": 1},
    "max_twice_j": {"type": "integer", "minimum": 0},
    "tail_tolerance": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "n_values": {
        "type": "array",
        "items": {"type": "integer", "minimum": 2},
        "minItems": 1,
    },
    "x_grid": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
    "n_res_list": {"type": "array", "items": n_res_schema, "minItems": 1},
    "n_res_multiples": {
        "type": "array",
        "items": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "inf"}]},
        "minItems": 1,
    },
    "n_bar_grid": {
        "type": "array",
        "items": {"type": "number", "exclusiveMinimum": 0},
        "minItems": 1,
    },
    "n_bar_list": {
        "type": "array",
        "items": {"type": "number", "minimum": 2},
        "minItems": 1,
    },
    "alpha_sq_points": {"type": "integer", "minimum": 3},
}

# Parameters each command needs before it can start
required_parameters = {
    "table1": ["n_values"],
    "fig1": ["n", "x_grid", "n_values"],
    "fig2": ["n_bar", "n_res_list", "n_res_multiples", "n_bar_grid"],
    "fig3": ["n_bar_list", "x_grid"],
    "qfi": ["n_res"],
    "cfi": ["n", "x", "phi"],
    "crb": ["phi", "shots", "n_res", "repeats", "seed"],
}


def command_schema(command: str) -> dict:
    return {
        "type": "object",
        "properties": parameter_schemas,
        "required": required_parameters[command],
        "additionalProperties": False,
    }


class RunConfig(HasTraits):
    """
    Everything needed to reproduce one command run: which command, its
    parameters, and where the output goes.
    """

    def __init__(self, command=None, parameters=None, **kwargs):
        """
        `command` is set first so that `parameters` is validated against the
        right schema.
        """
        super().__init__()
        self.command = command
        self.parameters = parameters if parameters is not None else {}
        if command == "crb":
            kwargs.setdefault("format", "json")
        for name, value in kwargs.items():
            setattr(self, name, value)

    command = Enum(
        COMMANDS,
        allow_none=True,
        help="""
        Name of the command this config runs
        """,
    )

    parameters = Dict(
        help="""
        Command-specific parameters, validated against the command's schema.

        Infinite photon-number resolution is spelled "inf".
        """,
    )

    output_path = Unicode(
        "-",
        help="""
        Path to write the output to, "-" for stdout
        """,
    )

    format = Enum(
        ("csv", "json"),
        default_value="csv",
        help="""
        Output format. Deterministic sweeps default to CSV, Monte Carlo runs are JSON.
        """,
    )

    @validate("parameters")
    def _validate_parameters(self, proposal):
        """
        Ensure every parameter is in range and the command's required
        parameters are present.
        """
        if self.command is None:
            raise TraitError("``command`` must be set before ``parameters``")
        try:
            jsonschema.validate(proposal["value"], command_schema(self.command))
        except jsonschema.ValidationError as e:
            where = "/".join(str(p) for p in e.absolute_path)
            prefix = f"{self.command}: {where}" if where else self.command
            raise TraitError(f"{prefix}: {e.message}")
        return proposal["value"]

    @validate("format")
    def _validate_format(self, proposal):
        if self.command == "crb" and proposal["value"] != "json":
            raise TraitError("crb results are only written as JSON")
        return proposal["value"]

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "output_path": self.output_path,
            "format": self.format,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            output_path=data["output_path"],
            format=data["format"],
        )

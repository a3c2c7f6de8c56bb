import logging
import logging.config
import math
import os
import sys

from pythonjsonlogger import jsonlogger
from traitlets import Bool, Dict, Enum, Float, Instance, Int, TraitError, Unicode, validate
from traitlets.config import Application

from ..errors import InvalidParameterError
from ..run_config import RunConfig
from ..special_fn import MAX_TWICE_J
from ..states import TAIL_TOLERANCE, InterferometerInput
from ..storage import OutputTarget
from ..tables import PanelDocument, record_to_json

DEFAULT_CONFIG_FILE = "squeezed_fisher_config.py"

# Common aliases we want to support in *all* commands
# The key is what the commandline argument should be, and the
# value is the traitlet config it will be translated to
common_aliases = {
    "log-level": "Application.log_level",
    "f": "BaseCommand.config_file",
    "config": "BaseCommand.config_file",
    "n-bar": "BaseCommand.n_bar",
    "alpha-sq": "BaseCommand.alpha_sq",
    "xi": "BaseCommand.xi",
    "theta-a": "BaseCommand.theta_a",
    "theta-b": "BaseCommand.theta_b",
    "n": "BaseCommand.n",
    "x": "BaseCommand.x",
    "phi": "BaseCommand.phi",
    "n-res": "BaseCommand.n_res",
    "shots": "BaseCommand.shots",
    "repeats": "BaseCommand.repeats",
    "seed": "BaseCommand.seed",
    "workers": "BaseCommand.workers",
    "max-twice-j": "BaseCommand.max_twice_j",
    "out": "BaseCommand.out",
    "format": "BaseCommand.format",
}

# Common flags we want to support in *all* commands.
# The key is the name of the flag, and the value is a tuple
# consisting of a dicitonary with the traitlet config that will be
# set, and a helpful description to be printed in the commandline
common_flags = {"json": ({"BaseCommand": {"json_logs": True}}, "Generate JSON output")}


class BaseCommand(Application):
    """
    Base Application for all our subcommands.

    Provides the physical parameters, numerical guards and output handling
    every command needs. Subclasses set `command_name` and implement
    `parameters()` and `compute()`.

    Do not directly instantiate!
    """

    command_name = ""

    log_level = logging.INFO

    logging_config = Dict(
        {},
        config=True,
        help="""
        Logging configuration for this python application.

        When set, this value is passed to logging.config.dictConfig,
        and can be used to configure how logs *throughout the application*
        are handled, not just for logs from this application alone.

        See https://docs.python.org/3/library/logging.config.html#logging.config.dictConfig
        for more details.
        """,
    )

    config_file = Unicode(
        DEFAULT_CONFIG_FILE,
        config=True,
        help="""
        Load traitlet config from this file if it exists
        """,
    )

    json_logs = Bool(
        False,
        config=True,
        help="""
        Provide JSON formatted logging output to stdout.

        If set to True, *all* output will be emitted as one JSON object per
        line. Each line has at least a 'status' and a 'message' field. When
        output goes to stdout, the 'completed' line carries it in 'output'.
        """,
    )

    out = Unicode(
        "-",
        config=True,
        help="""
        Path to write results to. "-" writes to stdout.

        Relative paths are resolved against OutputTarget.root_path.
        """,
    )

    format = Enum(
        ("csv", "json"),
        default_value="csv",
        config=True,
        help="""
        Output format of the results
        """,
    )

    n_bar = Float(
        None,
        allow_none=True,
        config=True,
        help="""
        Mean photon number of the input, |alpha|^2 + sinh^2|xi|.

        Together with alpha_sq (default n_bar / 2) fixes a phase-matched input.
        """,
    )

    alpha_sq = Float(
        None,
        allow_none=True,
        config=True,
        help="""
        Mean photon number |alpha|^2 of the coherent beam
        """,
    )

    xi = Float(
        None,
        allow_none=True,
        config=True,
        help="""
        Squeeze parameter magnitude |xi|.

        When set, the input is (alpha_sq, xi, theta_a, theta_b) and n_bar is ignored.
        """,
    )

    theta_a = Float(0.0, config=True, help="Phase of the coherent amplitude, radians")

    theta_b = Float(0.0, config=True, help="Phase of the squeeze parameter, radians")

    n = Int(None, allow_none=True, config=True, help="Total photon number N")

    x = Float(
        None,
        allow_none=True,
        config=True,
        help="""
        Ratio |alpha|^2 / tanh|xi| that fixes a normalized N-photon component
        """,
    )

    phi = Float(None, allow_none=True, config=True, help="Interferometer phase, radians")

    n_res = Unicode(
        "inf",
        config=True,
        help="""
        Largest total photon number N = N_1 + N_2 the detectors resolve,
        or "inf" for ideal detectors.
        """,
    )

    shots = Int(10_000, config=True, help="Measurements per phase estimate")

    repeats = Int(200, config=True, help="Independent phase estimates per Monte Carlo run")

    seed = Int(42, config=True, help="Seed of the random streams")

    workers = Int(1, config=True, help="Threads used for Monte Carlo repeats")

    max_twice_j = Int(
        MAX_TWICE_J,
        config=True,
        help="""
        Refuse Wigner d-matrices with 2J above this
        """,
    )

    tail_tolerance = Float(
        TAIL_TOLERANCE,
        config=True,
        help="""
        Probability mass allowed beyond the photon-number cutoff used for "inf"
        """,
    )

    output_target = Instance(
        klass=OutputTarget,
        allow_none=True,
        help="""
        Non-configurable instance of OutputTarget, set up in initialize()
        """,
    )

    @validate("n_res")
    def _validate_n_res(self, proposal):
        value = proposal["value"].strip().lower()
        if value in ("inf", "infinity"):
            return "inf"
        try:
            number = int(value)
        except ValueError:
            raise TraitError(f"n_res must be a non-negative integer or 'inf', got {proposal['value']!r}")
        if number < 0:
            raise TraitError(f"n_res must be >= 0, got {number}")
        return str(number)

    @property
    def n_res_value(self) -> float:
        return math.inf if self.n_res == "inf" else int(self.n_res)

    @property
    def n_res_parameter(self):
        return "inf" if self.n_res == "inf" else int(self.n_res)

    def input_parameters(self) -> dict:
        """
        The input-state parameters that were given, for RunConfig
        """
        params = {"theta_a": self.theta_a, "theta_b": self.theta_b}
        for name in ("n_bar", "alpha_sq", "xi"):
            if getattr(self, name) is not None:
                params[name] = getattr(self, name)
        return params

    def build_input(self) -> InterferometerInput:
        """
        Turn the input-state parameters into an InterferometerInput
        """
        if self.xi is not None:
            alpha_sq = self.alpha_sq if self.alpha_sq is not None else 0.0
            if alpha_sq < 0:
                raise InvalidParameterError(f"alpha_sq must be >= 0, got {alpha_sq}")
            return InterferometerInput(
                alpha_mag=math.sqrt(alpha_sq),
                xi_mag=self.xi,
                theta_a=self.theta_a,
                theta_b=self.theta_b,
            )
        if self.n_bar is None:
            raise InvalidParameterError("the input needs either --n-bar or --xi")
        alpha_sq = self.alpha_sq if self.alpha_sq is not None else self.n_bar / 2
        inp = InterferometerInput.from_split(self.n_bar, alpha_sq)
        return InterferometerInput(
            alpha_mag=inp.alpha_mag,
            xi_mag=inp.xi_mag,
            theta_a=self.theta_a,
            theta_b=self.theta_b,
        )

    def numerics(self) -> dict:
        return {"max_twice_j": self.max_twice_j, "tail_tolerance": self.tail_tolerance}

    def parameters(self) -> dict:
        """
        Parameters of this run, validated by RunConfig before compute()
        """
        raise NotImplementedError

    def compute(self, config: RunConfig):
        """
        Run the command. Returns a PanelDocument or a dict record.
        """
        raise NotImplementedError

    def make_config(self) -> RunConfig:
        return RunConfig(
            command=self.command_name,
            parameters=self.parameters(),
            output_path=self.out,
            format=self.format,
        )

    def render(self, config: RunConfig, result) -> str:
        if isinstance(result, PanelDocument):
            return result.render(config.format)
        return record_to_json(config.command, config.parameters, result)

    @property
    def _plain_stdout(self) -> bool:
        return self.out == "-" and not self.json_logs

    def progress(self, message: str, **extra):
        """
        Log a status line. Kept off stdout when stdout carries plain output.
        """
        level = logging.DEBUG if self._plain_stdout else logging.INFO
        self.log.log(level, message, extra={"status": "running", **extra})

    def start(self):
        config = self.make_config()
        self.progress(f"Running {config.command}", parameters=config.parameters)
        result = self.compute(config)
        text = self.render(config, result)

        if self.out == "-" and self.json_logs:
            self.log.info(
                f"{config.command} complete",
                extra={"status": "completed", "output": text},
            )
            return
        written = self.output_target.write(config.output_path, text, config.command)
        if written != "-":
            self.log.info(
                f"{config.command} complete, wrote {written}",
                extra={"status": "completed", "path": written},
            )

    def json_excepthook(self, etype, evalue, traceback):
        """
        Called on an uncaught exception when using json logging

        Avoids non-JSON output on errors when using --json-logs
        """
        self.log.error(
            "Error during running: %s",
            evalue,
            exc_info=(etype, evalue, traceback),
            extra=dict(status="failed"),
        )

    def exit(self, exit_status=0):
        # command-line values traitlets cannot parse are invalid parameters
        super().exit(2 if exit_status == 1 else exit_status)

    def initialize(self, argv=None):
        super().initialize(argv)
        # Load traitlets config from a config file if passed
        if self.config_file:
            self.load_config_file(self.config_file)
            if (
                not os.path.exists(self.config_file)
                and self.config_file != DEFAULT_CONFIG_FILE
            ):
                # Throw an explicit error and exit if config file isn't present
                print(
                    f"Could not read config from file {self.config_file}. Make sure it exists and is readable",
                    file=sys.stderr,
                )
                sys.exit(2)

        # Allow arbitrary logging config if set
        # We do this first up so any custom logging we set up ourselves
        # is not affected, as by default dictConfig will replace all
        # existing config.
        if self.logging_config:
            logging.config.dictConfig(self.logging_config)

        # The application communicates with the outside world via
        # stdout, and we structure this communication via logging.
        # So let's setup the default logger to log to stdout, rather
        # than stderr. The root logger is used so library modules
        # logging through getLogger(__name__) end up here too.
        logHandler = logging.StreamHandler(sys.stdout)
        self.log = logging.getLogger()

        # Remove all existing handlers so we don't repeat messages
        self.log.handlers = []
        self.log.addHandler(logHandler)
        self.log.setLevel(self.log_level)

        # Capture all warnings as well, and route them to our logger
        # This makes sure we don't accidentally write warnings to stderr
        # when calling this with --json
        warnings_logger = logging.getLogger("py.warnings")
        warnings_logger.parent = self.log
        logging.captureWarnings(True)

        if self.json_logs:
            # register JSON excepthook to avoid non-JSON output on uncaught exception
            sys.excepthook = self.json_excepthook
            formatter = jsonlogger.JsonFormatter()
            logHandler.setFormatter(formatter)
        else:
            # Just put out the message here, nothing else.
            logHandler.formatter = logging.Formatter(fmt="%(message)s")

        self.output_target = OutputTarget(parent=self)

"""
Point d'entrée en ligne de commande du workbench d'opérateurs
"""
import logging
import sys
from functools import wraps
from typing import List, Optional

import numpy as np
import typer
from rich.console import Console
from rich.markup import escape

from config.settings import config
from tools.errors import MalformedInput, NonConvergenceError, PreconditionError, WorkbenchError
from tools.serialization import load_json, matrix_from_json, model_from_json
from workflows import (
    DilationWorkflow,
    Example32Workflow,
    FolkloreWorkflow,
    FunctionalCalculusWorkflow,
    SemigroupWorkflow,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NON_CONVERGENCE = 2
EXIT_PRECONDITION = 3
EXIT_MALFORMED = 4

logger = logging.getLogger(__name__)
console = Console(stderr=True)

app = typer.Typer(help="Numerical operator-theory workbench", add_completion=False)

FC = config.command_defaults("fc")
DILATE = config.command_defaults("dilate")
SEMIGROUP = config.command_defaults("semigroup")
EXAMPLE32 = config.command_defaults("example32")
FOLKLORE = config.command_defaults("folklore")


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def parse_grid(spec: str) -> np.ndarray:
    """MIN:MAX:COUNT -> linspace"""
    parts = spec.split(":")
    if len(parts) != 3:
        raise MalformedInput("grid", "expected MIN:MAX:COUNT")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise MalformedInput("grid", str(e)) from e
    if count < 1 or hi < lo:
        raise MalformedInput("grid", "need COUNT >= 1 and MAX >= MIN")
    return np.linspace(lo, hi, count)


def parse_float_list(spec: str, field: str) -> List[float]:
    try:
        return [float(item) for item in spec.split(",") if item.strip()]
    except ValueError as e:
        raise MalformedInput(field, str(e)) from e


def check_format(output_format: str, allowed=("json", "csv")):
    if output_format not in allowed:
        raise MalformedInput("format", f"expected one of {list(allowed)}")


def exit_codes(command):
    """Traduire les exceptions du workbench en codes de sortie"""
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            passed = command(*args, **kwargs)
        except NonConvergenceError as e:
            console.print(f"❌ NonConvergence: {escape(str(e))}")
            raise typer.Exit(EXIT_NON_CONVERGENCE)
        except PreconditionError as e:
            console.print(f"❌ {type(e).__name__}: {escape(str(e))}")
            raise typer.Exit(EXIT_PRECONDITION)
        except MalformedInput as e:
            console.print(f"❌ MalformedInput: {escape(str(e))}")
            raise typer.Exit(EXIT_MALFORMED)
        except WorkbenchError as e:
            console.print(f"❌ {type(e).__name__}: {escape(str(e))}")
            raise typer.Exit(EXIT_CHECK_FAILED)
        if not passed:
            console.print("⚠️ checks failed")
            raise typer.Exit(EXIT_CHECK_FAILED)
        console.print("✅ done")
    return wrapper


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="DEBUG logging")):
    setup_logging(verbose)


@app.command("fc")
@exit_codes
def cmd_fc(
    input_path: Optional[str] = typer.Option(None, "--input", help="Job JSON with matrix, function, region"),
    matrix: Optional[str] = typer.Option(None, "--matrix", help="Matrix JSON"),
    function: Optional[str] = typer.Option(None, "--function", help="Function JSON"),
    region: Optional[str] = typer.Option(None, "--region", help="Region JSON"),
    output: Optional[str] = typer.Option(None, "--output", help="Result JSON path"),
    tol: float = typer.Option(FC.get("tol", config.quadrature.tol), "--tol"),
    output_format: str = typer.Option("json", "--format"),
):
    """f(A) par quadrature de contour"""
    check_format(output_format, ("json",))
    workflow = FunctionalCalculusWorkflow(tol=tol)
    job = workflow.load_job(input_path, matrix, function, region)
    return workflow.execute(job, output)["passed"]


@app.command("dilate")
@exit_codes
def cmd_dilate(
    input_path: Optional[str] = typer.Option(None, "--input", help="DilationModel JSON"),
    random_dim: int = typer.Option(DILATE.get("random_dim", 4), "--random-dim", help="Seeded random model when no --input"),
    output: Optional[str] = typer.Option(None, "--output"),
    seed: int = typer.Option(config.run.seed, "--seed"),
    samples: int = typer.Option(DILATE.get("samples", 20), "--samples"),
    g_samples: int = typer.Option(DILATE.get("g_samples", 10_000), "--g-samples"),
    n_max: int = typer.Option(DILATE.get("n_max", config.dilation.n_max), "--n-max"),
    tol: float = typer.Option(DILATE.get("tol", config.dilation.tol), "--tol"),
    output_format: str = typer.Option("json", "--format"),
):
    """Vérifications de la dilatation"""
    check_format(output_format, ("json",))
    workflow = DilationWorkflow(seed=seed, samples=samples, g_samples=g_samples, n_max=n_max, tol=tol)
    model = model_from_json(load_json(input_path, "input")) if input_path else workflow.random_model(random_dim)
    return workflow.execute(model, output)["passed"]


@app.command("semigroup")
@exit_codes
def cmd_semigroup(
    input_path: Optional[str] = typer.Option(None, "--input", help="Matrix JSON of A, T(t) = exp(-tA)"),
    output: Optional[str] = typer.Option(None, "--output", help="CSV path (certificate JSON alongside)"),
    t0: float = typer.Option(SEMIGROUP.get("t0", 1.0), "--t0"),
    alpha: float = typer.Option(SEMIGROUP.get("alpha", 2 ** 0.5), "--alpha"),
    grid: str = typer.Option(SEMIGROUP.get("grid", "0:5:51"), "--grid", help="MIN:MAX:COUNT"),
    output_format: str = typer.Option("csv", "--format"),
):
    """Minoration exponentielle et sous-multiplicativité"""
    check_format(output_format)
    if not input_path:
        raise MalformedInput("input", "missing")
    A = matrix_from_json(load_json(input_path, "input"), "input")
    workflow = SemigroupWorkflow(t0=t0, alpha=alpha)
    return workflow.execute(A, parse_grid(grid), output, output_format)["passed"]


@app.command("example32")
@exit_codes
def cmd_example32(
    phi: str = typer.Option(EXAMPLE32.get("phi", "xsq"), "--phi"),
    t: str = typer.Option(EXAMPLE32.get("t", "0.05,0.1,0.2,0.5"), "--t", help="Comma-separated t values"),
    output: Optional[str] = typer.Option(None, "--output", help="CSV path (validation JSON alongside)"),
    output_format: str = typer.Option("csv", "--format"),
):
    """Normes de l'exemple à croissance arbitraire"""
    check_format(output_format)
    workflow = Example32Workflow(phi)
    return workflow.execute(parse_float_list(t, "t"), output, output_format)["passed"]


@app.command("folklore")
@exit_codes
def cmd_folklore(
    eta: float = typer.Option(FOLKLORE.get("eta", 1.0), "--eta"),
    epsilon: float = typer.Option(FOLKLORE.get("epsilon", 0.5), "--epsilon"),
    a: float = typer.Option(FOLKLORE.get("a", 1.0), "--a"),
    sigma: float = typer.Option(FOLKLORE.get("sigma", 2.356194490192345), "--sigma"),
    sigma_prime: float = typer.Option(FOLKLORE.get("sigma_prime", 1.9634954084936207), "--sigma-prime"),
    count: int = typer.Option(FOLKLORE.get("count", 20), "--count"),
    seed: int = typer.Option(config.run.seed, "--seed"),
    output: Optional[str] = typer.Option(None, "--output"),
    output_format: str = typer.Option("json", "--format"),
):
    """Constante du lemme de contrôle de la dérivée"""
    check_format(output_format, ("json",))
    workflow = FolkloreWorkflow(seed=seed, count=count)
    return workflow.execute(eta, epsilon, a, sigma, sigma_prime, output)["passed"]


@app.command("config-check")
def cmd_config_check():
    """Valider la configuration"""
    result = config.validate_config()
    for error in result["errors"]:
        console.print(f"❌ {escape(error)}")
    for warning in result["warnings"]:
        console.print(f"⚠️ {escape(warning)}")
    if not result["is_valid"]:
        raise typer.Exit(EXIT_MALFORMED)
    console.print("✅ configuration valide")


if __name__ == "__main__":
    app()

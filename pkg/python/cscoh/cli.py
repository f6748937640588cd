# cscoh/cli.py
import json
import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from . import catalog, reports
from .analysis import SCAN_TARGETS, deformation_scan
from .cohomology import Flavor
from .config import ConfigManager, EngineConfig, OutputFormat, get_config_manager
from .engine import CohomologyEngine
from .errors import ConsistencyError, CscohError, SpecError
from .expressions import parse_form
from .model import ManifoldSpec, instantiate, parse_spec, perturb_omega
from .scalars import GaussianRational, parse_scalar

app = typer.Typer(help="Exact complex-symplectic cohomology of invariant complexes")
console = Console(stderr=True)
logger = logging.getLogger(__name__)

CatalogOption = typer.Option(None, "--catalog", "-c", help="Catalog entry name")
SpecOption = typer.Option(None, "--spec", "-s", help="Spec file path or name in configured spec_paths")
ParamOption = typer.Option(None, "--param", "-p", help="Parameter values, e.g. t=1/2")
FormatOption = typer.Option(None, "--format", "-f", help="Output format")


def _config(ctx: typer.Context) -> EngineConfig:
    if ctx.obj is None:
        manager = get_config_manager()
        manager.update_from_environment()
        ctx.obj = manager.load_config()
    return ctx.obj


@app.callback()
def main(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Logging level for diagnostics on stderr"),
):
    """Exact complex-symplectic cohomology of invariant complexes"""
    config = _config(ctx)
    level = (log_level or config.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(message)s",
        handlers=[RichHandler(console=console, show_time=False, show_path=False)],
        force=True,
    )


def _fail(e: Exception, code: int):
    console.print(f"[red]Error: {escape(str(e))}[/red]", highlight=False)
    raise typer.Exit(code)


def _guard(body: Callable[[], None]):
    """Run a command body, mapping engine errors to exit codes"""
    try:
        body()
    except ConsistencyError as e:
        console.print(f"[red]Error: {escape(str(e))}[/red]", highlight=False)
        if e.dump:
            console.print(json.dumps(e.dump, indent=2, sort_keys=True), markup=False, highlight=False)
        raise typer.Exit(e.exit_code)
    except CscohError as e:
        _fail(e, e.exit_code)
    except ValueError as e:
        _fail(e, 1)


def parse_params(text: Optional[str]) -> Dict[str, List[GaussianRational]]:
    """`t=1/2,s=1` or, for scans, `t=0,1/2,1`; bare values extend the previous name"""
    values: Dict[str, List[GaussianRational]] = {}
    current = None
    for chunk in (text or "").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" in chunk:
            current, literal = (part.strip() for part in chunk.split("=", 1))
            if current in values:
                raise SpecError("parameter given twice", token=current)
            values[current] = [parse_scalar(literal)]
        elif current is None:
            raise SpecError("parameter value without a name", token=chunk)
        else:
            values[current].append(parse_scalar(chunk))
    return values


def _single_values(text: Optional[str]) -> Dict[str, GaussianRational]:
    result = {}
    for name, vals in parse_params(text).items():
        if len(vals) != 1:
            raise SpecError("expected one value per parameter", token=name)
        result[name] = vals[0]
    return result


def load_spec(config: EngineConfig, catalog_name: Optional[str], spec: Optional[str]) -> ManifoldSpec:
    if (catalog_name is None) == (spec is None):
        raise CscohError("give exactly one of --catalog and --spec")
    if catalog_name is not None:
        return parse_spec(catalog.entry(catalog_name).text)
    candidates = [Path(spec)]
    for directory in config.spec_paths:
        candidates += [Path(directory) / spec, Path(directory) / f"{spec}.cscoh"]
    for path in candidates:
        if path.is_file():
            logger.debug("reading spec from %s", path)
            return parse_spec(path.read_text())
    raise CscohError(f"spec file {spec} not found")


def _engine(ctx: typer.Context, catalog_name, spec, param) -> CohomologyEngine:
    config = _config(ctx)
    return CohomologyEngine(instantiate(load_spec(config, catalog_name, spec), _single_values(param)), config)


def _format(ctx: typer.Context, output: Optional[OutputFormat]) -> OutputFormat:
    return output or _config(ctx).output_format


def _emit(text: str):
    typer.echo(text, nl=False)


@app.command()
def validate(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    output: Optional[OutputFormat] = FormatOption,
):
    """Check every structural identity of a manifold spec"""

    def body():
        engine = _engine(ctx, catalog_name, spec, param)
        report = engine.validation_report()
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.json_report(engine, "validate", {"ok": report.ok}))
        else:
            _emit(reports.text_report(engine, [f"validation: {'ok' if report.ok else 'FAILED'}"]))

    _guard(body)


@app.command()
def cohomology(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    flavor: str = typer.Option("all", "--flavor", help="dolbeault, dbar-lambda, bc, aeppli or all"),
    output: Optional[OutputFormat] = FormatOption,
):
    """Dimension tables of the four cohomologies"""

    def body():
        flavors = Flavor.parse(flavor)
        engine = _engine(ctx, catalog_name, spec, param)
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.json_report(engine, "cohomology", reports.cohomology_payload(engine, flavors)))
        else:
            _emit(reports.text_report(engine, reports.cohomology_text(engine, flavors)))

    _guard(body)


@app.command()
def harmonic(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    flavor: str = typer.Option("all", "--flavor", help="dolbeault, dbar-lambda, bc, aeppli or all"),
    output: Optional[OutputFormat] = FormatOption,
):
    """Harmonic bases per bidegree"""

    def body():
        flavors = Flavor.parse(flavor)
        engine = _engine(ctx, catalog_name, spec, param)
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.json_report(engine, "harmonic", reports.harmonic_payload(engine, flavors)))
        else:
            _emit(reports.text_report(engine, reports.harmonic_text(engine, flavors, _config(ctx).text_width)))

    _guard(body)


@app.command()
def hlc(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    flavor: str = typer.Option("dolbeault", "--flavor", help="dolbeault, dbar-lambda, bc, aeppli or all"),
    output: Optional[OutputFormat] = FormatOption,
):
    """Hard Lefschetz Condition on total-degree cohomology"""

    def body():
        flavors = Flavor.parse(flavor)
        engine = _engine(ctx, catalog_name, spec, param)
        results = [engine.hlc(f) for f in flavors]
        if _format(ctx, output) is OutputFormat.JSON:
            payload = {r.flavor.value: reports.hlc_payload(r) for r in results}
            _emit(reports.json_report(engine, "hlc", payload))
        else:
            _emit(reports.text_report(engine, [line for r in results for line in reports.hlc_text(r)]))

    _guard(body)


@app.command()
def lemma(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    output: Optional[OutputFormat] = FormatOption,
):
    """dbar dbar_lambda-Lemma verdict by three independent routes"""

    def body():
        engine = _engine(ctx, catalog_name, spec, param)
        verdict = engine.lemma()
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.json_report(engine, "lemma", reports.lemma_payload(verdict)))
        else:
            _emit(reports.text_report(engine, reports.lemma_text(verdict, engine.inst.n)))

    _guard(body)


@app.command()
def massey(
    ctx: typer.Context,
    a: str = typer.Option(..., "--a", help="Class a as a form"),
    b: str = typer.Option(..., "--b", help="Class b as a form"),
    c: str = typer.Option(..., "--c", help="Class c as a form"),
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    output: Optional[OutputFormat] = FormatOption,
):
    """Dolbeault-Massey triple product <[a], [b], [c]>"""

    def body():
        engine = _engine(ctx, catalog_name, spec, param)
        inst = engine.inst
        forms = [parse_form(text, inst.names, inst.assignments) for text in (a, b, c)]
        result = engine.massey(*forms)
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.json_report(engine, "massey", reports.massey_payload(result, inst.names)))
        else:
            _emit(reports.text_report(engine, reports.massey_text(result, inst.names)))

    _guard(body)


@app.command()
def probe(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: Optional[str] = ParamOption,
    flavor: str = typer.Option("bc", "--flavor", help="dolbeault, dbar-lambda, bc, aeppli or all"),
    output: Optional[OutputFormat] = FormatOption,
):
    """Is the wedge of two harmonic forms harmonic?"""

    def body():
        flavors = Flavor.parse(flavor)
        engine = _engine(ctx, catalog_name, spec, param)
        results = [engine.wedge_probe(f) for f in flavors]
        names = engine.inst.names
        if _format(ctx, output) is OutputFormat.JSON:
            payload = {r.flavor.value: reports.probe_payload(r, names) for r in results}
            _emit(reports.json_report(engine, "probe", payload))
        else:
            _emit(reports.text_report(engine, [line for r in results for line in reports.probe_text(r, names)]))

    _guard(body)


@app.command()
def scan(
    ctx: typer.Context,
    catalog_name: Optional[str] = CatalogOption,
    spec: Optional[str] = SpecOption,
    param: str = typer.Option(..., "--param", "-p", help="One parameter and its sampled values, e.g. t=0,1/2,1"),
    what: str = typer.Option("lemma", "--what", help="lemma, hlc or massey"),
    perturb: Optional[str] = typer.Option(None, "--perturb-omega", help="Scan omega + eps * FORM over eps"),
    a: Optional[str] = typer.Option(None, "--a", help="Class a for massey scans"),
    b: Optional[str] = typer.Option(None, "--b", help="Class b for massey scans"),
    c: Optional[str] = typer.Option(None, "--c", help="Class c for massey scans"),
    output: Optional[OutputFormat] = FormatOption,
):
    """Run one analysis at each sampled parameter value"""

    def body():
        if what not in SCAN_TARGETS:
            raise CscohError(f"unknown scan target {what!r}; choose one of {', '.join(SCAN_TARGETS)}")
        config = _config(ctx)
        base = load_spec(config, catalog_name, spec)
        if perturb is not None:
            base = perturb_omega(base, perturb)
        sampled = parse_params(param)
        if len(sampled) != 1:
            raise CscohError("scan samples exactly one parameter")
        (name, values), = sampled.items()
        forms = None
        if what == "massey":
            if None in (a, b, c):
                raise CscohError("massey scans need --a, --b and --c")
            forms = (a, b, c)
        report = deformation_scan(base, name, values, what, massey_forms=forms)
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.scan_json(report, base.name))
        else:
            _emit(reports.scan_text(report, base.name))

    _guard(body)


catalog_app = typer.Typer(help="Built-in manifold specs")
app.add_typer(catalog_app, name="catalog")


@catalog_app.command("list")
def catalog_list(ctx: typer.Context, output: Optional[OutputFormat] = FormatOption):
    """List the catalog with provenance notes"""

    def body():
        entries = catalog.list_entries()
        if _format(ctx, output) is OutputFormat.JSON:
            _emit(reports.catalog_json(entries))
        else:
            _emit(reports.catalog_text(entries, _config(ctx).text_width))

    _guard(body)


@catalog_app.command("show")
def catalog_show(name: str = typer.Argument(..., help="Catalog entry name")):
    """Print a catalog entry as a spec document"""
    _guard(lambda: _emit(catalog.entry(name).text))


config_app = typer.Typer(help="Configuration")
app.add_typer(config_app, name="config")


@config_app.command("show")
def config_show(ctx: typer.Context):
    """Show the effective configuration and any issues"""
    manager = get_config_manager()
    config = _config(ctx)
    typer.echo(f"config file: {manager.config_path}")
    for key, value in sorted(config.to_dict().items()):
        typer.echo(f"{key}: {value}")
    valid, issues = manager.validate_config()
    for issue in issues:
        console.print(f"[yellow]Warning: {escape(issue)}[/yellow]")
    if not valid:
        raise typer.Exit(1)


@config_app.command("init")
def config_init(
    path: Optional[str] = typer.Option(None, "--path", help="Where to write the config file"),
):
    """Write a default configuration file"""
    manager = get_config_manager() if path is None else ConfigManager(config_path=path)
    if not manager.save_config(manager.load_config()):
        console.print(f"[red]Error: could not write {manager.config_path}[/red]")
        raise typer.Exit(1)
    typer.echo(f"wrote {manager.config_path}")


@config_app.command("sample")
def config_sample():
    """Print a sample configuration file"""
    _emit(get_config_manager().create_sample_config())

"""Command-line interface: rank, match, annotate, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from wsmatch.annotate import annotate_pair
from wsmatch.config import load_config
from wsmatch.engine import rank_candidates, service_similarity
from wsmatch.errors import WsMatchError
from wsmatch.mapping import MatchingPlan, validate_plan
from wsmatch.registry import load_registry
from wsmatch.relations import build_correspondence_table, suggest_matching
from wsmatch.wsdl import parse_wsdl_location


def _common_options(func):
    func = click.option(
        "--config", "config_path", type=click.Path(), default=None,
        help="JSON config file; flags override its values.",
    )(func)
    func = click.option(
        "--lexicon", type=click.Path(), default=None,
        help="WordNet directory or fixture lexicon file.",
    )(func)
    func = click.option(
        "--weights", nargs=3, type=float, default=None,
        help="Input/output/name weights (default 1 1 2).",
    )(func)
    func = click.option(
        "--threshold", type=float, default=None,
        help="Set-relation coverage threshold (default 0.5).",
    )(func)
    return func


@click.group()
def cli():
    """Web service substitution matchmaker."""


@cli.command()
@click.argument("target")
@click.argument("registry")
@_common_options
@click.option("--json", "as_json", is_flag=True, help="Emit the ranking as JSON.")
def rank(target, registry, config_path, lexicon, weights, threshold, as_json):
    """Rank registry candidates by similarity to TARGET."""
    cfg = load_config(config_path, lexicon=lexicon, weights=weights, threshold=threshold)
    target_service = parse_wsdl_location(target)
    manifest = load_registry(registry)
    calc = cfg.calculator()
    pool = []
    failures = []
    for entry in manifest.entries:
        try:
            pool.append(parse_wsdl_location(entry.wsdl_uri))
        except WsMatchError as exc:
            failures.append({"name": entry.name, "error": str(exc)})
    ranked, score_failures = rank_candidates(calc, target_service, pool, cfg.weights)
    failures.extend(
        {"name": f.name, "error": f.error} for f in score_failures
    )
    if as_json:
        click.echo(json.dumps({
            "target": target_service.name,
            "ranking": [
                {"name": rc.service.name, "sourceUri": rc.service.source_uri,
                 "score": rc.score}
                for rc in ranked
            ],
            "failures": failures,
        }, indent=2))
        return
    click.echo(f"target: {target_service.name} ({len(pool)} candidates)")
    for i, rc in enumerate(ranked):
        click.echo(f"{i:3d}. {rc.score:0.2f}  {rc.service.name}  {rc.service.source_uri}")
    for failure in failures:
        click.echo(f"  !  {failure['name']}: {failure['error']}", err=True)


@cli.command()
@click.argument("target")
@click.argument("candidate")
@_common_options
@click.option("--json", "json_out", type=click.Path(), default=None,
              help="Also write table + suggestions as JSON to this path.")
def match(target, candidate, config_path, lexicon, weights, threshold, json_out):
    """Print the correspondence table between TARGET and CANDIDATE."""
    cfg = load_config(config_path, lexicon=lexicon, weights=weights, threshold=threshold)
    left = parse_wsdl_location(target)
    right = parse_wsdl_location(candidate)
    calc = cfg.calculator()
    score, matrix = service_similarity(calc, left, right, cfg.weights)
    table = build_correspondence_table(calc, left, right, matrix, cfg.threshold)
    suggestions = suggest_matching(table)

    click.echo(f"service similarity: {score:0.2f}")
    width = max(len(r) for r in table.rows) + 2
    header = " " * width + "  ".join(f"{c:>24}" for c in table.cols)
    click.echo(header)
    for row_name, row in zip(table.rows, table.cells):
        rendered = "  ".join(
            f"{cell.relation.kind.value}({cell.score:0.2f})".rjust(24) for cell in row
        )
        click.echo(f"{row_name:<{width}}{rendered}")
    click.echo("suggestions:")
    for row in suggestions:
        if row.no_match:
            click.echo(f"  {row.row}: no suggestion")
        else:
            top = row.entries[0]
            click.echo(
                f"  {row.row}: {top.col} [{top.relation.kind.value}({top.score:0.2f})]"
            )
    if json_out:
        payload = {
            "serviceSimilarity": score,
            "table": table.to_json_dict(),
            "suggestions": [row.to_json_dict() for row in suggestions],
        }
        Path(json_out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
        click.echo(f"wrote {json_out}")


@cli.command()
@click.argument("target")
@click.argument("candidate")
@click.argument("plan_file", type=click.Path(exists=True))
@_common_options
@click.option("--out-dir", type=click.Path(), default=".",
              help="Directory for the two annotated documents.")
def annotate(target, candidate, plan_file, config_path, lexicon, weights,
             threshold, out_dir):
    """Write the SAWSDL-annotated pair for a confirmed PLAN_FILE (JSON)."""
    left = parse_wsdl_location(target)
    right = parse_wsdl_location(candidate)
    plan = MatchingPlan.from_json_dict(
        json.loads(Path(plan_file).read_text(encoding="utf-8"))
    )
    report = validate_plan(plan, left, right)
    for problem in report.problems:
        click.echo(f"{problem.severity}: {problem.message}", err=True)
    if not report.ok:
        raise click.ClickException("plan failed validation")
    pair = annotate_pair(left, right, plan)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    left_path = out / f"{left.name}-annotated.wsdl"
    right_path = out / f"{right.name}-annotated.wsdl"
    left_path.write_bytes(pair.substituted_doc)
    right_path.write_bytes(pair.substituent_doc)
    manifest_path = out / "annotation-manifest.json"
    manifest_path.write_text(json.dumps(pair.manifest, indent=2), encoding="utf-8")
    click.echo(f"wrote {left_path}")
    click.echo(f"wrote {right_path}")
    click.echo(f"wrote {manifest_path}")


@cli.command()
@_common_options
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", type=click.Path(), default=None,
              help="Session persistence directory.")
def serve(config_path, lexicon, weights, threshold, port, host, data_dir):
    """Run the matching-session HTTP API."""
    import uvicorn

    from wsmatch.server import create_app

    cfg = load_config(
        config_path, lexicon=lexicon, weights=weights,
        threshold=threshold, data_dir=data_dir,
    )
    uvicorn.run(create_app(cfg), host=host, port=port)


def main():
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    except WsMatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()

"""Command line for embedding generation."""

from __future__ import annotations

import click

from . import __version__
from .encode import DEFAULT_MODEL, embed_units


@click.command()
@click.version_option(version=__version__, prog_name="chiasmos-embed")
@click.option("--units", "units_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Unit table TSV from the prepare step.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Embedding file to write (chiasmos-emb-v1).")
@click.option("--model", "model_name", default=DEFAULT_MODEL, show_default=True,
              help="Sentence-encoder model id or local path.")
@click.option("--batch", "batch_size", type=int, default=64, show_default=True)
def main(units_path, out_path, model_name, batch_size):
    """Embed every unit of a prepared table into an embedding file."""
    try:
        with open(out_path, "w", encoding="utf-8") as out:
            count = embed_units(units_path, out, model_name=model_name, batch_size=batch_size)
    except (ValueError, RuntimeError, OSError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"embedded {count} units to {out_path}")


if __name__ == "__main__":
    main()

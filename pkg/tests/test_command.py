"""Tests for the setuptools side of accretive_wave.command."""
from __future__ import annotations

from pathlib import Path

import pytest
import setuptools
from setuptools import Distribution

from accretive_wave.cli import COMMANDS
from accretive_wave.command import DIST_ATTRS, ExitCode
from accretive_wave.command.admissible import Admissible
from accretive_wave.command.solve import Solve
from accretive_wave.exception import FileError, OptionError

FIXTURE_DIR = Path(__file__).resolve().parent


@pytest.mark.parametrize("command", COMMANDS.values())
def test_commands_are_setuptools_commands(command):
    assert issubclass(command, setuptools.Command)
    dist = Distribution(DIST_ATTRS)
    cmd = command(dist)
    assert cmd.distribution is dist
    assert not cmd.finalized


@pytest.mark.parametrize(
    ("option", "value"),
    [("N", "x"), ("p", "two"), ("theorem", "3")],
)
def test_admissible_invalid_options(option, value):
    """Test the admissible command with invalid options."""
    options = {"mu": "2", "p": "2", option: value}
    cmd = Admissible(Distribution(DIST_ATTRS), **options)
    with pytest.raises(OptionError):
        cmd.finalize_options()


def test_admissible_run(capsys):
    cmd = Admissible(Distribution(DIST_ATTRS), mu="2", p="2", N="3")
    cmd.ensure_finalized()
    assert cmd.finalized
    assert cmd.run() == ExitCode.OK
    assert '"admissible": true' in capsys.readouterr().out


def test_solve_needs_a_readable_config(tmp_path: Path):
    cmd = Solve(Distribution(DIST_ATTRS), config=str(tmp_path / "none.json"))
    with pytest.raises(FileError):
        cmd.ensure_finalized()


@pytest.mark.datafiles(FIXTURE_DIR.parent / "samples" / "zero_data")
def test_solve_with_distribution(datafiles: Path):
    """Test the zero_data sample run as a setuptools command."""
    out = datafiles / "output"
    cmd = Solve(
        Distribution(DIST_ATTRS),
        config=str(datafiles / "config.json"),
        out=str(out),
    )
    cmd.ensure_finalized()
    assert cmd.run() == ExitCode.OK
    assert (out / "trajectory.csv").is_file()

"""
Tests du pilote en ligne de commande (codes de sortie et fichiers produits).
"""

import json

import pandas as pd
import scipy.linalg

from main import EXIT_CONFIG, EXIT_FAILURE, EXIT_INSTABILITY, EXIT_OK, main
from src import media
from src.storage import read_pgm, read_snapshot


class TestCommands:

    def test_run_writes_outputs(self, tmp_path):
        out = tmp_path / "run"
        code = main(["-q", "run", "--preset", "point2d", "--dx", "0.05", "--t-end", "0.1",
                     "--out", str(out), "--no-figures"])
        assert code == EXIT_OK
        snap = read_snapshot(out / "u_t0.1000.bin")
        assert snap.data.shape == (25, 25)
        assert read_pgm(out / "u_t0.1000.pgm").shape == (21, 21)
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["name"] == "point2d"
        assert summary["steps"] > 0
        assert len(pd.read_csv(out / "history.csv")) == summary["steps"] + 1

    def test_profile_csv(self, tmp_path):
        assert main(["profile", "--zeta-bars", "20", "80", "--out", str(tmp_path)]) == EXIT_OK
        table = pd.read_csv(tmp_path / "profile.csv")
        assert list(table.columns) == ["x", "zeta_20", "zeta_80"]
        assert (tmp_path / "profile.png").exists()

    def test_stability(self, tmp_path):
        assert main(["-q", "stability", "--dim", "3", "--samples", "20", "--active", "1",
                     "--out", str(tmp_path)]) == EXIT_OK
        table = pd.read_csv(tmp_path / "stability_3d.csv")
        assert table["complete"].all()

    def test_convergence(self, tmp_path):
        assert main(["-q", "convergence", "--scenario", "zero", "--levels", "5", "10", "20",
                     "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "convergence_zero.csv").exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        empty = tmp_path / "empty.json"
        empty.write_text("", encoding="utf-8")
        assert main(["-q", "run", str(empty)]) == EXIT_CONFIG
        assert "schema_version" in capsys.readouterr().err

    def test_non_nested_levels_exit_code(self):
        assert main(["-q", "convergence", "--levels", "20", "30", "60"]) == EXIT_CONFIG

    def test_causality_exit_code(self, tmp_path):
        code = main(["-q", "errors", "--preset", "point2d", "--dx", "0.05", "--t-end", "1.0",
                     "--half-width", "1.0", "--out", str(tmp_path), "--no-figures"])
        assert code == EXIT_CONFIG

    def test_scalar_source_location_exit_code(self, tmp_path, capsys):
        config = tmp_path / "bad_source.json"
        config.write_text(json.dumps({"preset": "point2d", "source": {"location": 0}}), encoding="utf-8")
        assert main(["-q", "run", str(config), "--dx", "0.05", "--t-end", "0.1",
                     "--out", str(tmp_path), "--no-figures"]) == EXIT_CONFIG
        assert "source.location" in capsys.readouterr().err


class TestInvalidArguments:
    """Les arguments refusés par les fonctions de calcul donnent le code 2, sans trace."""

    def test_negative_speed(self, capsys):
        assert main(["-q", "stability", "--c", "-1", "--samples", "3"]) == EXIT_CONFIG
        assert "Argument invalide" in capsys.readouterr().err

    def test_active_out_of_range(self):
        assert main(["-q", "stability", "--dim", "2", "--active", "5", "--samples", "3"]) == EXIT_CONFIG

    def test_negative_zeta(self):
        assert main(["-q", "stability", "--zeta", "-1", "2", "--samples", "3"]) == EXIT_CONFIG

    def test_zero_layer_width(self):
        assert main(["-q", "profile", "--L", "0"]) == EXIT_CONFIG

    def test_zero_layer_width_with_output(self, tmp_path):
        assert main(["-q", "profile", "--L", "0", "--out", str(tmp_path)]) == EXIT_CONFIG
        assert not (tmp_path / "profile.csv").exists()


class TestRuntimeFailures:

    def test_instability_exit_code(self, tmp_path, monkeypatch, capsys):
        """Une amplitude de source non finie fait diverger u dès le premier pas."""
        monkeypatch.setattr(media, "source_amplitude", lambda t, f0: float("nan"))
        code = main(["-q", "run", "--preset", "point2d", "--dx", "0.05", "--t-end", "0.1",
                     "--out", str(tmp_path), "--no-figures"])
        assert code == EXIT_INSTABILITY
        assert "Instabilité numérique" in capsys.readouterr().err
        assert not (tmp_path / "summary.json").exists()

    def test_eigensolver_failure_exit_code(self, monkeypatch, capsys):
        def failing(*args, **kwargs):
            raise scipy.linalg.LinAlgError("pas de convergence")

        monkeypatch.setattr(scipy.linalg, "eigvals", failing)
        assert main(["-q", "stability", "--samples", "2"]) == EXIT_FAILURE
        assert "valeurs propres" in capsys.readouterr().err

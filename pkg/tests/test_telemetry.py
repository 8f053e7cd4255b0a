"""Tests for span export."""

import json

import pytest

from sreda import telemetry
from sreda.telemetry import (
    get_tracer,
    initialize_telemetry,
    rotate_if_needed,
    shutdown_telemetry,
    traced_span,
)


@pytest.fixture(autouse=True)
def _reset_tracer():
    yield
    shutdown_telemetry()


class TestInitialization:
    """Tests for initialize_telemetry."""

    def test_disabled_means_no_tracer(self):
        """With telemetry off, spans are None and nothing is written."""
        initialize_telemetry(enabled=False)
        assert get_tracer() is None
        with traced_span("experiment.run") as span:
            assert span is None

    def test_no_exporter(self, captured_logs):
        """Enabled without any exporter leaves tracing off."""
        initialize_telemetry(enabled=True, export_to_file=False, otlp_endpoint=None)
        assert get_tracer() is None
        assert "no exporter" in captured_logs.getvalue()

    def test_file_export(self, tmp_path):
        """Finished spans are appended to the JSON Lines file."""
        path = tmp_path / "traces.jsonl"
        initialize_telemetry(enabled=True, trace_file=str(path), service_name="bench")
        with traced_span("solver.sreda", **{"solver.seed": 3}) as span:
            assert span is not None
        shutdown_telemetry()
        records = [json.loads(line) for line in path.read_text().splitlines()]
        assert records[0]["name"] == "solver.sreda"
        assert records[0]["attributes"]["solver.seed"] == 3
        assert records[0]["resource"]["service.name"] == "bench"
        assert telemetry._tracer is None


class TestRotation:
    """Tests for size-based rotation."""

    def test_small_file_is_kept(self, tmp_path):
        """Files under the limit stay in place."""
        path = tmp_path / "traces.jsonl"
        path.write_text("{}\n")
        assert not rotate_if_needed(path, 1)
        assert path.exists()

    def test_large_file_is_rotated(self, tmp_path):
        """A file past the limit moves to the next free index."""
        path = tmp_path / "traces.jsonl"
        (tmp_path / "traces.1.jsonl").write_text("old\n")
        path.write_bytes(b"x" * (1024 * 1024 + 1))
        assert rotate_if_needed(path, 1)
        assert not path.exists()
        assert (tmp_path / "traces.2.jsonl").stat().st_size == 1024 * 1024 + 1

    def test_rotation_disabled(self, tmp_path):
        """A limit of 0 turns rotation off."""
        path = tmp_path / "traces.jsonl"
        path.write_bytes(b"x" * 10)
        assert not rotate_if_needed(path, 0)

    def test_exporter_rotates_before_writing(self, tmp_path):
        """An oversized trace file is moved aside and new spans start a fresh file."""
        path = tmp_path / "traces.jsonl"
        path.write_bytes(b"x" * (1024 * 1024 + 1))
        initialize_telemetry(
            enabled=True, trace_file=str(path), rotation_enabled=True, rotation_max_size_mb=1
        )
        with traced_span("solver.sgda"):
            pass
        shutdown_telemetry()
        assert (tmp_path / "traces.1.jsonl").stat().st_size == 1024 * 1024 + 1
        records = [json.loads(line) for line in path.read_text().splitlines()]
        assert [record["name"] for record in records] == ["solver.sgda"]

    def test_exporter_without_rotation_appends(self, tmp_path):
        """With rotation off the exporter keeps appending to the same file."""
        path = tmp_path / "traces.jsonl"
        path.write_text('{"name": "old"}\n')
        initialize_telemetry(
            enabled=True, trace_file=str(path), rotation_enabled=False, rotation_max_size_mb=1
        )
        with traced_span("solver.sgda"):
            pass
        shutdown_telemetry()
        assert not (tmp_path / "traces.1.jsonl").exists()
        assert [json.loads(line)["name"] for line in path.read_text().splitlines()] == [
            "old",
            "solver.sgda",
        ]

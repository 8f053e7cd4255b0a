"""
OpenTelemetry tracing for experiment runs.

Spans are opened around whole CLI commands (``experiment.<command>``), each
seed (``seed.<algorithm>``) and each solver call (``solver.<algorithm>``).
Tracing is off unless enabled in the application settings.

Export modes:
- File: JSON Lines, one OTLP-shaped span per line, with size-based rotation
- OTLP: gRPC export to a collector
- Both at once
"""

import json
from contextlib import contextmanager, nullcontext
from pathlib import Path
from typing import IO, Any, Iterator, Optional, Sequence

from loguru import logger
from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.resources import SERVICE_NAME, Resource
from opentelemetry.sdk.trace import ReadableSpan, TracerProvider
from opentelemetry.sdk.trace.export import (
    BatchSpanProcessor,
    SimpleSpanProcessor,
    SpanExporter,
    SpanExportResult,
)

from sreda.utils import get_app_data_dir

_tracer: Optional[trace.Tracer] = None
_tracer_provider: Optional[TracerProvider] = None


def span_record(span: ReadableSpan, resource: Resource) -> dict[str, Any]:
    """Convert a finished span into an OTLP-style JSON object."""
    context = span.get_span_context()
    return {
        "name": span.name,
        "trace_id": format(context.trace_id, "032x"),
        "span_id": format(context.span_id, "016x"),
        "parent_span_id": format(span.parent.span_id, "016x") if span.parent else None,
        "kind": span.kind.name,
        "start_time_unix_nano": span.start_time,
        "end_time_unix_nano": span.end_time,
        "status": {
            "code": span.status.status_code.name,
            "message": span.status.description,
        },
        "attributes": dict(span.attributes or {}),
        "events": [
            {
                "name": event.name,
                "time_unix_nano": event.timestamp,
                "attributes": dict(event.attributes or {}),
            }
            for event in span.events
        ],
        "resource": dict(resource.attributes or {}),
    }


class JSONLinesSpanExporter(SpanExporter):
    """Appends spans to a JSON Lines file, rotating it past ``max_size_mb``."""

    def __init__(self, path: Path, resource: Resource, max_size_mb: int = 10):
        self.path = path
        self.resource = resource
        self.max_size_mb = max_size_mb
        self._handle: Optional[IO[str]] = None

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        if not spans:
            return SpanExportResult.SUCCESS
        try:
            if rotate_if_needed(self.path, self.max_size_mb):
                self._close()
            handle = self._open()
            for span in spans:
                handle.write(json.dumps(span_record(span, self.resource), default=str) + "\n")
            handle.flush()
            return SpanExportResult.SUCCESS
        except OSError as e:
            logger.error(f"Failed to write spans to {self.path}: {e}")
            return SpanExportResult.FAILURE

    def shutdown(self) -> None:
        self._close()

    def _open(self) -> IO[str]:
        if self._handle is None or self._handle.closed:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.path, "a", encoding="utf-8")
        return self._handle

    def _close(self) -> None:
        if self._handle is not None:
            try:
                self._handle.close()
            except OSError as e:
                logger.warning(f"Error closing trace file: {e}")
            finally:
                self._handle = None


def default_trace_path(trace_file: Optional[str] = None) -> Path:
    """Trace file location: ``trace_file`` or ``<app data>/traces.jsonl``."""
    if trace_file is not None:
        return Path(trace_file).expanduser().resolve()
    return get_app_data_dir() / "traces.jsonl"


def rotate_if_needed(path: Path, max_size_mb: int) -> bool:
    """Move ``path`` to the next free ``<stem>.<n><suffix>`` once it is too big.

    Returns:
        True if the file was rotated
    """
    if max_size_mb <= 0 or not path.exists():
        return False
    size_mb = path.stat().st_size / (1024 * 1024)
    if size_mb < max_size_mb:
        return False
    index = 1
    while (rotated := path.with_name(f"{path.stem}.{index}{path.suffix}")).exists():
        index += 1
    try:
        path.rename(rotated)
    except OSError as e:
        logger.warning(f"Failed to rotate trace file: {e}")
        return False
    logger.info(f"Rotated trace file to {rotated} ({size_mb:.2f} MB)")
    return True


def initialize_telemetry(
    service_name: str = "sreda",
    otlp_endpoint: Optional[str] = None,
    export_to_file: bool = True,
    trace_file: Optional[str] = None,
    enabled: bool = False,
    rotation_enabled: bool = True,
    rotation_max_size_mb: int = 10,
) -> None:
    """
    Initialize OpenTelemetry tracing.

    Args:
        service_name: Service name attached to every span
        otlp_endpoint: OTLP gRPC collector endpoint; None disables OTLP export
        export_to_file: Write spans to a JSON Lines file
        trace_file: Custom trace file path (default: app data directory)
        enabled: Master switch; nothing is set up when False
        rotation_enabled: Rotate the trace file by size
        rotation_max_size_mb: Size in MB that triggers rotation
    """
    global _tracer, _tracer_provider

    if not enabled:
        logger.debug("Telemetry disabled")
        return
    if not otlp_endpoint and not export_to_file:
        logger.warning("Telemetry enabled but no exporter configured")
        return

    resource = Resource(attributes={SERVICE_NAME: service_name})
    provider = TracerProvider(resource=resource)
    exporters = []

    if otlp_endpoint:
        try:
            provider.add_span_processor(
                BatchSpanProcessor(OTLPSpanExporter(endpoint=otlp_endpoint, insecure=True))
            )
            exporters.append(f"OTLP({otlp_endpoint})")
        except Exception as e:
            logger.warning(f"Failed to initialize OTLP exporter to {otlp_endpoint}: {e}")

    if export_to_file:
        path = default_trace_path(trace_file)
        max_size_mb = rotation_max_size_mb if rotation_enabled else 0
        # Spans are written as they end so short CLI runs never lose them
        provider.add_span_processor(
            SimpleSpanProcessor(JSONLinesSpanExporter(path, resource, max_size_mb))
        )
        exporters.append(f"File({path})")

    if not exporters:
        logger.warning("No trace exporters were initialized")
        return

    trace.set_tracer_provider(provider)
    _tracer_provider = provider
    _tracer = provider.get_tracer(__name__)
    logger.info(f"Telemetry initialized: service={service_name}, exporters={', '.join(exporters)}")


def get_tracer() -> Optional[trace.Tracer]:
    """
    Get the global tracer instance.

    Returns:
        The tracer, or None if telemetry is not initialized
    """
    return _tracer


@contextmanager
def traced_span(name: str, **attributes) -> Iterator[Optional[trace.Span]]:
    """Open span ``name`` when tracing is on; yield None otherwise."""
    tracer = get_tracer()
    context = (
        tracer.start_as_current_span(name, attributes=attributes) if tracer else nullcontext()
    )
    with context as span:
        yield span


def shutdown_telemetry() -> None:
    """Flush pending spans and drop the global tracer."""
    global _tracer, _tracer_provider

    if _tracer_provider is not None:
        try:
            _tracer_provider.shutdown()
            logger.debug("Telemetry shutdown complete")
        except Exception as e:
            logger.warning(f"Error during telemetry shutdown: {e}")
        finally:
            _tracer_provider = None
            _tracer = None

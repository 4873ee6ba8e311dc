import json
import logging

import structlog

from flowgame import metrics
from flowgame.app_logging import configure_logging
from flowgame.certificates.cert import BASE_CERT, build_cert
from flowgame.settings import Settings, settings


class TestSettings:
    def test_defaults(self):
        fresh = Settings()
        assert fresh.MATCH_GRACE >= 1
        assert fresh.SOLVER_MAX_HEIGHT == 2
        assert fresh.LAYER_SUM == "1"

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("FLOWGAME_MATCH_GRACE", "5")
        monkeypatch.setenv("FLOWGAME_LOG_JSON", "true")
        fresh = Settings()
        assert fresh.MATCH_GRACE == 5
        assert fresh.LOG_JSON is True


class TestLogging:
    def test_json_renderer(self, monkeypatch, caplog):
        monkeypatch.setattr(settings, "LOG_JSON", True)
        caplog.set_level(logging.INFO)
        try:
            configure_logging()
            structlog.get_logger("flowgame.test").info("ping", answer=42)
            record = json.loads(caplog.records[-1].getMessage())
            assert record["event"] == "ping"
            assert record["answer"] == 42
            assert record["level"] == "info"
        finally:
            structlog.reset_defaults()


class TestMetrics:
    def test_match_counter(self):
        registry = metrics.get_registry()
        before = registry.get_sample_value("flowgame_matches_total", {"verdict": "Undecided"}) or 0
        metrics.record_match("Undecided", 4)
        assert registry.get_sample_value("flowgame_matches_total", {"verdict": "Undecided"}) == before + 1
        assert b"flowgame_match_rounds_bucket" in metrics.render_latest()

    def test_certificate_counter(self):
        registry = metrics.get_registry()
        metrics.record_cert_built()
        before = registry.get_sample_value("flowgame_certs_built_total")
        build_cert(BASE_CERT)
        assert registry.get_sample_value("flowgame_certs_built_total") == before + 1

    def test_feature_flag(self, monkeypatch):
        monkeypatch.setattr(settings, "FEATURE_PROMETHEUS_METRICS", False)
        registry = metrics.get_registry()
        metrics.record_illegal_move("M", "Probe")
        assert registry.get_sample_value("flowgame_illegal_moves_total", {"player": "M", "error": "Probe"}) is None

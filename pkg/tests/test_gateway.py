import concurrent.futures
import json
import threading
import urllib.request

import pytest

from mostmt.gateway import (
    ApiError,
    GatewayServer,
    ServiceConfig,
    TranslationRequest,
    TranslationService,
    load_config,
)
from mostmt.gateway.config import BackendConfig

PIVOT_BACKENDS = (
    BackendConfig(id="toy-cs-uk", kind="dictionary", src="cs", tgt="uk"),
    BackendConfig(id="toy-uk-cs", kind="dictionary", src="uk", tgt="cs"),
    BackendConfig(id="toy-cs-en", kind="dictionary", src="cs", tgt="en"),
    BackendConfig(id="toy-en-uk", kind="dictionary", src="en", tgt="uk"),
)


@pytest.fixture()
def service(tmp_path):
    config = ServiceConfig(usage_log=str(tmp_path / "usage.jsonl"))
    svc = TranslationService(config)
    yield svc
    svc.close()


class TestHandleTranslate:
    def test_translation_with_transliteration(self, service):
        response = service.handle_translate(
            TranslationRequest(
                src="cs", tgt="uk",
                texts=["Jsem nemocná. A co Vy?"],
                include_translit=True,
            )
        )
        assert response.translations == ["Я хвора. А що Ви?"]
        assert response.translit_tgt == ["Ja chvora. A ščo Vy?"]
        assert response.translit_src == ["Йсем немоцна́. А цо Ви?"]

    def test_empty_batch(self, service):
        response = service.handle_translate(
            TranslationRequest(src="cs", tgt="uk", texts=[])
        )
        assert response.translations == []

    def test_src_equals_tgt_rejected(self, service):
        with pytest.raises(ApiError) as err:
            service.handle_translate(
                TranslationRequest(src="cs", tgt="cs", texts=["x"])
            )
        assert err.value.status == 400
        assert err.value.code == "unsupported_pair"

    def test_unsupported_pair(self, service):
        with pytest.raises(ApiError) as err:
            service.handle_translate(
                TranslationRequest(src="cs", tgt="de", texts=["x"])
            )
        assert err.value.code == "unsupported_pair"

    def test_oversize_text(self, tmp_path):
        config = ServiceConfig(
            max_text_chars=10, usage_log=str(tmp_path / "u.jsonl")
        )
        svc = TranslationService(config)
        try:
            with pytest.raises(ApiError) as err:
                svc.handle_translate(
                    TranslationRequest(src="cs", tgt="uk", texts=["x" * 11])
                )
            assert err.value.code == "oversize_text"
        finally:
            svc.close()

    def test_multiple_texts_align_one_to_one(self, service):
        response = service.handle_translate(
            TranslationRequest(
                src="cs", tgt="uk",
                texts=["Dobrý den.", "", "Děkuji. Ano."],
            )
        )
        assert len(response.translations) == 3
        assert response.translations[0] == "Добрий день."
        assert response.translations[1] == ""
        assert response.translations[2] == "Дякую. Так."

    def test_no_translit_when_not_requested(self, service):
        response = service.handle_translate(
            TranslationRequest(src="cs", tgt="uk", texts=["Ano."])
        )
        assert response.translit_src is None
        assert response.translit_tgt is None


class TestLanguages:
    def test_default_config_lists_direct_pairs(self, service):
        assert service.list_languages() == [
            {"src": "cs", "tgt": "uk", "kind": "direct"},
            {"src": "uk", "tgt": "cs", "kind": "direct"},
        ]

    def test_pivot_pairs_marked(self, tmp_path):
        config = ServiceConfig(
            allow_pivot=True,
            backends=(
                BackendConfig(id="cs-en", kind="dictionary", src="cs", tgt="en"),
                BackendConfig(id="en-cs", kind="dictionary", src="en", tgt="cs"),
                BackendConfig(id="uk-en", kind="dictionary", src="uk", tgt="en"),
                BackendConfig(id="en-uk", kind="dictionary", src="en", tgt="uk"),
            ),
            usage_log=str(tmp_path / "u.jsonl"),
        )
        svc = TranslationService(config)
        try:
            kinds = {(p["src"], p["tgt"]): p["kind"] for p in svc.list_languages()}
            assert kinds[("cs", "en")] == "direct"
            assert kinds[("cs", "uk")] == "pivot"
            assert kinds[("uk", "cs")] == "pivot"
        finally:
            svc.close()

    def test_pivot_route_used_when_direct_missing(self, tmp_path):
        config = ServiceConfig(
            allow_pivot=True,
            backends=(
                BackendConfig(id="toy-cs-en", kind="dictionary", src="cs", tgt="en"),
                BackendConfig(id="toy-en-uk", kind="dictionary", src="en", tgt="uk"),
            ),
            usage_log=str(tmp_path / "u.jsonl"),
        )
        svc = TranslationService(config)
        try:
            pairs = svc.list_languages()
            kinds = {(p["src"], p["tgt"]): p["kind"] for p in pairs}
            assert kinds[("cs", "uk")] == "pivot"
            response = svc.handle_translate(
                TranslationRequest(src="cs", tgt="uk", texts=["Jsem nemocná."])
            )
            assert response.translations == ["Я хворий."]  # pivot loses gender
        finally:
            svc.close()


class TestConsentLogging:
    def test_consent_true_logs_one_record(self, service):
        service.handle_translate(
            TranslationRequest(
                src="cs", tgt="uk", texts=["Dobrý den."],
                logging_consent=True, client_id="c1",
            )
        )
        records = service.usage_log.iter_records()
        assert len(records) == 1
        assert records[0]["direction"] == "cs-uk"
        assert records[0]["chars"] == len("Dobrý den.")

    def test_consent_false_logs_nothing(self, service):
        service.handle_translate(
            TranslationRequest(
                src="cs", tgt="uk", texts=["Dobrý den."],
                logging_consent=False, client_id="c1",
            )
        )
        assert not service.usage_log.path.exists()

    def test_default_consent_is_config_default(self, service):
        service.handle_translate(
            TranslationRequest(src="cs", tgt="uk", texts=["Ano."])
        )
        assert not service.usage_log.path.exists()  # default is opt-in=false

    def test_on_premise_never_logs(self, tmp_path):
        config = ServiceConfig(
            on_premise=True, usage_log=str(tmp_path / "u.jsonl")
        )
        svc = TranslationService(config)
        try:
            svc.handle_translate(
                TranslationRequest(
                    src="cs", tgt="uk", texts=["Tajné."],
                    logging_consent=True, client_id="police",
                )
            )
            assert not (tmp_path / "u.jsonl").exists()
            assert svc.stats().rows == []
        finally:
            svc.close()

    def test_stats_reflect_logged_requests(self, service):
        for _ in range(3):
            service.handle_translate(
                TranslationRequest(
                    src="uk", tgt="cs", texts=["Дякую за допомогу."],
                    logging_consent=True, client_id="c2",
                )
            )
        report = service.stats()
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row.direction == "uk-cs"
        assert row.requests == 3
        assert row.characters == 3 * len("Дякую за допомогу.")


class TestRateLimit:
    def test_below_rate_never_rejected(self, tmp_path):
        config = ServiceConfig(
            rate_per_sec=1000, rate_burst=50,
            usage_log=str(tmp_path / "u.jsonl"),
        )
        svc = TranslationService(config)
        try:
            for _ in range(40):
                svc.handle_translate(
                    TranslationRequest(src="cs", tgt="uk", texts=["Ano."], client_id="ok")
                )
        finally:
            svc.close()

    def test_burst_overrun_rejected_with_retry_after(self, tmp_path):
        config = ServiceConfig(
            rate_per_sec=1, rate_burst=2, usage_log=str(tmp_path / "u.jsonl")
        )
        svc = TranslationService(config)
        try:
            svc.handle_translate(
                TranslationRequest(src="cs", tgt="uk", texts=["a"], client_id="x")
            )
            svc.handle_translate(
                TranslationRequest(src="cs", tgt="uk", texts=["a"], client_id="x")
            )
            with pytest.raises(ApiError) as err:
                svc.handle_translate(
                    TranslationRequest(src="cs", tgt="uk", texts=["a"], client_id="x")
                )
            assert err.value.status == 429
            assert err.value.code == "rate_limited"
            assert err.value.retry_after > 0
        finally:
            svc.close()


class TestConcurrency:
    def test_concurrent_results_match_sequential(self, tmp_path):
        config = ServiceConfig(usage_log=str(tmp_path / "u.jsonl"))
        svc = TranslationService(config)
        try:
            inputs = [
                f"Dobrý den. Mám {i} knihy. Děkuji za pomoc."
                for i in range(120)
            ]
            sequential = [
                svc.handle_translate(
                    TranslationRequest(src="cs", tgt="uk", texts=[text])
                ).translations
                for text in inputs
            ]
            with concurrent.futures.ThreadPoolExecutor(max_workers=24) as pool:
                concurrent_results = list(
                    pool.map(
                        lambda text: svc.handle_translate(
                            TranslationRequest(src="cs", tgt="uk", texts=[text])
                        ).translations,
                        inputs,
                    )
                )
            assert concurrent_results == sequential
        finally:
            svc.close()


class TestHttpServer:
    @pytest.fixture()
    def server(self, tmp_path):
        config = ServiceConfig(port=0, usage_log=str(tmp_path / "usage.jsonl"))
        with GatewayServer(config) as srv:
            yield srv

    def _post(self, url, payload):
        body = json.dumps(payload).encode("utf-8")
        request = urllib.request.Request(
            url + "/api/v2/translate",
            data=body,
            headers={"Content-Type": "application/json"},
        )
        with urllib.request.urlopen(request, timeout=5) as resp:
            return resp.status, json.loads(resp.read().decode("utf-8"))

    def _get(self, url, path):
        with urllib.request.urlopen(url + path, timeout=5) as resp:
            return resp.status, json.loads(resp.read().decode("utf-8"))

    def test_translate_roundtrip(self, server):
        status, payload = self._post(
            server.url,
            {
                "src": "cs", "tgt": "uk",
                "texts": ["Jsem nemocná. A co Vy?"],
                "include_translit": True,
                "logging_consent": False,
            },
        )
        assert status == 200
        assert payload["translations"] == ["Я хвора. А що Ви?"]
        assert payload["translit_tgt"] == ["Ja chvora. A ščo Vy?"]

    def test_healthz(self, server):
        status, payload = self._get(server.url, "/healthz")
        assert status == 200
        assert payload["status"] == "ok"

    def test_languages(self, server):
        status, payload = self._get(server.url, "/api/v2/languages")
        assert status == 200
        assert {"src": "cs", "tgt": "uk", "kind": "direct"} in payload["pairs"]

    def test_stats_endpoint(self, server):
        self._post(
            server.url,
            {"src": "cs", "tgt": "uk", "texts": ["Ano."], "logging_consent": True},
        )
        status, payload = self._get(server.url, "/api/v2/stats")
        assert status == 200
        assert payload["days"][0]["requests"] == 1
        assert payload["skipped"] == 0

    def test_error_body_carries_code(self, server):
        try:
            self._post(server.url, {"src": "cs", "tgt": "cs", "texts": ["x"]})
            raised = False
        except urllib.error.HTTPError as err:
            raised = True
            assert err.code == 400
            payload = json.loads(err.read().decode("utf-8"))
            assert payload["error"]["code"] == "unsupported_pair"
        assert raised

    def test_malformed_request_is_400(self, server):
        request = urllib.request.Request(
            server.url + "/api/v2/translate",
            data=b"this is not json",
            headers={"Content-Type": "application/json"},
        )
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(request, timeout=5)
        assert err.value.code == 400

    def test_unknown_path_is_404(self, server):
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(server.url + "/api/v1/translate", timeout=5)
        assert err.value.code == 404

    def test_cors_headers_present(self, server):
        with urllib.request.urlopen(server.url + "/healthz", timeout=5) as resp:
            assert resp.headers["Access-Control-Allow-Origin"] == "*"


class TestChaining:
    def test_remote_backend_consumes_our_own_gateway(self, tmp_path):
        """The remote wire contract mirrors the gateway API, so one
        instance can serve as another's backend."""
        from mostmt.backends import RemoteBackend, RemoteConfig

        upstream_config = ServiceConfig(port=0, usage_log=str(tmp_path / "up.jsonl"))
        with GatewayServer(upstream_config) as upstream:
            backend = RemoteBackend(
                "chained", "cs", "uk", RemoteConfig(url=upstream.url, timeout=5.0)
            )
            assert backend.translate_batch(["Dobrý den."]) == ["Добрий день."]


class TestConfig:
    def test_defaults_without_file(self):
        config = load_config(None)
        assert config.max_batch == 8
        assert config.consent_default is False
        assert len(config.backends) == 2

    def test_toml_roundtrip(self, tmp_path):
        path = tmp_path / "gateway.toml"
        path.write_text(
            """
port = 9999
max_text_chars = 500
consent_default = true
on_premise = true
allow_pivot = true

[batching]
max_batch = 16
max_wait_ms = 10
queue_cap = 42

[rate_limit]
rate_per_sec = 5.5
burst = 11

[logging]
usage_log = "/tmp/x.jsonl"

[[backends]]
id = "b1"
kind = "dictionary"
src = "cs"
tgt = "uk"

[[backends]]
id = "b2"
kind = "remote"
src = "cs"
tgt = "en"
url = "http://example.invalid:9"
timeout = 1.5
max_retries = 7
""",
            encoding="utf-8",
        )
        config = load_config(path)
        assert config.port == 9999
        assert config.max_batch == 16
        assert config.max_wait_seconds == pytest.approx(0.01)
        assert config.queue_cap == 42
        assert config.rate_per_sec == 5.5
        assert config.on_premise is True
        assert config.backends[1].kind == "remote"
        assert config.backends[1].max_retries == 7

    def test_port_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MOSTMT_PORT", "7777")
        assert load_config(None).port == 7777

import json

from helper_functions import DEFAULT_CONFIG, default_workers, load_config, write_text


def test_missing_config_is_written(tmp_path, monkeypatch):
    monkeypatch.delenv("STEINLAB_THREADS", raising=False)
    path = tmp_path / "config.json"
    config = load_config(path)
    assert config == DEFAULT_CONFIG
    assert json.loads(path.read_text())["seed"] == DEFAULT_CONFIG["seed"]


def test_file_values_override_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv("STEINLAB_THREADS", raising=False)
    path = tmp_path / "config.json"
    path.write_text('{"seed": 7, "workers": 2}')
    config = load_config(path)
    assert (config["seed"], config["workers"]) == (7, 2)
    assert config["chunk_size"] == DEFAULT_CONFIG["chunk_size"]


def test_thread_variable_wins_over_file(tmp_path, monkeypatch):
    monkeypatch.setenv("STEINLAB_THREADS", "6")
    path = tmp_path / "config.json"
    path.write_text('{"workers": 2}')
    assert load_config(path)["workers"] == 6


def test_bad_thread_variable_falls_back(monkeypatch):
    monkeypatch.setenv("STEINLAB_THREADS", "many")
    assert default_workers() == DEFAULT_CONFIG["workers"]
    monkeypatch.setenv("STEINLAB_THREADS", "0")
    assert default_workers() == DEFAULT_CONFIG["workers"]


def test_broken_config_uses_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv("STEINLAB_THREADS", raising=False)
    path = tmp_path / "config.json"
    path.write_text("{not json")
    assert load_config(path) == DEFAULT_CONFIG


def test_write_text(tmp_path, capsys):
    path = tmp_path / "reports" / "out.csv"
    write_text("a,b\n1,2\n", path)
    assert path.read_text() == "a,b\n1,2\n"
    write_text("no newline")
    assert capsys.readouterr().out == "no newline\n"

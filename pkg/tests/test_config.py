"""
配置加载测试
"""
import os

from torelli_lab.config import get_settings


def test_dotenv_in_working_directory_is_loaded(tmp_path, monkeypatch):
    (tmp_path / ".env").write_text("TORELLI_LAB_DEFAULT_SEED=11\n", encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TORELLI_LAB_DEFAULT_SEED", raising=False)
    get_settings.cache_clear()
    try:
        assert get_settings().DEFAULT_SEED == 11
        assert os.environ["TORELLI_LAB_DEFAULT_SEED"] == "11"
    finally:
        os.environ.pop("TORELLI_LAB_DEFAULT_SEED", None)
        get_settings.cache_clear()


def test_defaults_without_dotenv(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TORELLI_LAB_DEFAULT_SEED", raising=False)
    get_settings.cache_clear()
    try:
        assert get_settings().DEFAULT_SEED == 7
    finally:
        get_settings.cache_clear()

from app.config import Settings, get_settings, settings, use_config_file
from app.domain.ci_test.schemas import TestOptions
from app.domain.npmle.schemas import FitOptions


class TestSettings:
    def test_defaults(self):
        defaults = Settings()
        assert defaults.GRAD_TOL == 1e-6
        assert defaults.GRID_SIZE == 20
        assert defaults.EPS_TAIL == 1e-12

    def test_environment_is_ignored(self, monkeypatch):
        monkeypatch.setenv("GRID_SIZE", "3")
        assert Settings().GRID_SIZE == 20

    def test_config_file_feeds_option_defaults(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("GRID_SIZE=7\nBOOTSTRAP_B=19\n")
        use_config_file(str(path))
        assert settings.GRID_SIZE == 7
        assert FitOptions().grid_size == 7
        assert TestOptions().B == 19

    def test_get_settings_is_cached(self):
        assert get_settings() is get_settings()

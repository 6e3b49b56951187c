from .conf.settings import Settings

settings = Settings()


def get_fuzz_settings() -> Settings:
    """Get the fuzz configuration, re-read from the environment.

    Returns:
        A fresh Settings instance so CLI invocations pick up `.env` changes.
    """
    return Settings()

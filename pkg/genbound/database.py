from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker, declarative_base
from genbound.config import get_settings

settings = get_settings()


def create_db_engine(url: str):
    # sqlite connections are shared with the runner's worker threads
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    return create_engine(url, pool_pre_ping=True, connect_args=connect_args)


engine = create_db_engine(settings.database_url)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


def init_db(bind=None):
    """Create the ledger tables."""
    from genbound import models  # noqa: F401  registers the tables on Base

    Base.metadata.create_all(bind=bind or engine)

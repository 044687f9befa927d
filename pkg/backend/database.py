# database.py - Job table for background screen renders

import enum
import logging
from datetime import datetime

from sqlalchemy import Column, DateTime, Integer, String, create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from backend.config import DATABASE_URL

logger = logging.getLogger(__name__)

# ========== DATABASE CONNECTION ==========

engine = create_engine(
    DATABASE_URL,
    connect_args={"check_same_thread": False} if DATABASE_URL.startswith("sqlite") else {},
)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()

# ========== STATUS OPTIONS ==========

class JobStatus(str, enum.Enum):
    """Lifecycle of one screen job"""
    PENDING = "pending"        # Queued, not started
    PROCESSING = "processing"  # Solving or writing files
    COMPLETED = "completed"    # Every requested file written
    FAILED = "failed"          # See the error column

# ========== TABLE ==========

class ScreenJob(Base):
    """One row per POST /screens request"""
    __tablename__ = "screen_jobs"

    job_id = Column(String, primary_key=True, index=True)

    status = Column(String, nullable=False, default=JobStatus.PENDING.value)
    message = Column(String, nullable=False, default="Screen queued")
    progress = Column(Integer, default=0)  # 0 to 100

    # Request, as entered
    a = Column(String, nullable=False)
    b = Column(String, nullable=False)
    sigma = Column(String, nullable=False)
    method = Column(String, nullable=False, default="eigen")

    # Filled in as the job runs
    canonical = Column(String, nullable=True)
    outputs = Column(String, nullable=True)  # comma-separated paths
    error = Column(String, nullable=True)

    started_at = Column(DateTime, default=datetime.now)
    completed_at = Column(DateTime, nullable=True)

    def to_dict(self):
        return {
            "job_id": self.job_id,
            "status": self.status,
            "message": self.message,
            "progress": self.progress,
            "a": self.a,
            "b": self.b,
            "sigma": self.sigma,
            "method": self.method,
            "canonical": self.canonical,
            "outputs": self.outputs.split(",") if self.outputs else [],
            "error": self.error,
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "completed_at": self.completed_at.isoformat() if self.completed_at else None,
        }

# ========== HELPER FUNCTIONS ==========

def get_db():
    """Session per request; use with Depends(get_db)"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db():
    """Create missing tables"""
    Base.metadata.create_all(bind=engine)
    logger.info("job database ready at %s", DATABASE_URL)

# ========== CRUD OPERATIONS ==========

def create_screen_job(db, **kwargs):
    """
    Insert a job row.

    Example:
    create_screen_job(db, job_id="abc-123", a="1", b="3", sigma="0")
    """
    job = ScreenJob(**kwargs)
    db.add(job)
    db.commit()
    db.refresh(job)
    return job


def get_screen_job(db, job_id: str):
    """The job with this id, or None"""
    return db.query(ScreenJob).filter(ScreenJob.job_id == job_id).first()


def update_screen_job(db, job_id: str, **updates):
    """Set the given columns on one job; returns the job or None"""
    job = get_screen_job(db, job_id)
    if job:
        for key, value in updates.items():
            setattr(job, key, value)
        db.commit()
        db.refresh(job)
    return job


def list_screen_jobs(db, limit: int = 100):
    """Newest first"""
    return db.query(ScreenJob).order_by(ScreenJob.started_at.desc()).limit(limit).all()

# api.py - FastAPI service: exact values, background screen renders, caustics

import logging
import os
import uuid
from datetime import datetime
from typing import Any, Dict, List, Optional

from fastapi import BackgroundTasks, Depends, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ValidationError
from sqlalchemy.orm import Session

from backend import config
from backend.database import (
    JobStatus,
    SessionLocal,
    create_screen_job,
    get_db,
    get_screen_job,
    init_db,
    list_screen_jobs,
    update_screen_job,
)
from backend.errors import InvalidArgumentsError, ThreeJError
from backend.exact_core import ExactValue, cg_from_3j, exact_3j, selection_rules
from backend.halfint import HalfInt, ThreeJArgs
from backend.recurrence import SolveMethod, solve_screen
from backend.render import DEFAULT_FORMATS, Colormap, OutputFormat, Overlay, RenderConfig, render_screen
from backend.semiclassics import GeomSpec, caustic_sigmas, cusp_point, trace_caustic
from backend.symmetry import ScreenSpec, canonicalize

logger = logging.getLogger(__name__)

app = FastAPI(title="3j Screens API", version="1.0.0")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# ========== MODELS ==========

class HealthResponse(BaseModel):
    status: str
    output_dir: str
    oracle_guard: int


class EvalRequest(BaseModel):
    entries: List[str]  # a b x alpha beta gamma
    strict: bool = False


class ExactPayload(BaseModel):
    exact: str
    sign: int
    square_numerator: int
    square_denominator: int
    value: float


class EvalResponse(BaseModel):
    symbol: str
    selection_rules: bool
    three_j: ExactPayload
    clebsch_gordan: ExactPayload


class ScreenRequest(BaseModel):
    a: str
    b: str
    sigma: str
    method: SolveMethod = SolveMethod.EIGEN
    formats: List[OutputFormat] = list(DEFAULT_FORMATS)
    floor: float = config.FLOOR
    ceiling: float = config.CEILING
    overlay: Overlay = Overlay.BOTH
    colormap: Colormap = Colormap.GRAYSCALE
    scale: int = 1
    doubled_ints: bool = False


class ScreenStartResponse(BaseModel):
    job_id: str
    message: str
    status: str
    canonical: str


class StatusResponse(BaseModel):
    job_id: str
    status: str
    message: str
    progress: Optional[int] = None
    a: str
    b: str
    sigma: str
    method: str
    canonical: Optional[str] = None
    outputs: List[str] = []
    error: Optional[str] = None
    started_at: str
    completed_at: Optional[str] = None


class JobsResponse(BaseModel):
    jobs: List[StatusResponse]


class CausticRequest(BaseModel):
    J1: str
    J2: str
    sigmas: Optional[List[str]] = None  # default: every allowed sigma


class CausticPanel(BaseModel):
    sigma: str
    cusp: bool
    cusp_point: Optional[List[float]] = None
    samples: List[List[float]]


class CausticsResponse(BaseModel):
    J1: str
    J2: str
    panels: List[CausticPanel]

# ========== HELPERS ==========

def _bad_request(e: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")


def _exact_payload(value: ExactValue) -> ExactPayload:
    return ExactPayload(
        exact=value.exact_form(),
        sign=value.sign,
        square_numerator=value.square.numerator,
        square_denominator=value.square.denominator,
        value=float(value),
    )


def _parse_all(tokens: List[str]) -> List[HalfInt]:
    try:
        return [HalfInt.parse(t) for t in tokens]
    except ThreeJError as e:
        raise _bad_request(e)

# ========== STARTUP ==========

@app.on_event("startup")
async def startup_event():
    init_db()
    os.makedirs(config.OUTPUT_DIR, exist_ok=True)
    logger.info("service ready, writing screens under %s", config.OUTPUT_DIR)

# ========== ENDPOINTS ==========

@app.get("/")
async def index() -> Dict[str, Any]:
    return {
        "service": app.title,
        "endpoints": {
            "GET /health": "liveness and settings",
            "POST /eval": "exact 3j and Clebsch-Gordan value",
            "POST /screens": "start a background screen render",
            "GET /status/{job_id}": "progress of one render",
            "GET /screens": "recent renders",
            "POST /caustics": "sampled caustic curves",
        },
    }


@app.get("/health", response_model=HealthResponse)
async def health_check():
    return HealthResponse(status="healthy", output_dir=config.OUTPUT_DIR,
                          oracle_guard=config.ORACLE_GUARD)


@app.post("/eval", response_model=EvalResponse)
async def evaluate(request: EvalRequest):
    """Exact value of one symbol; invalid symbols are zero unless strict"""
    if len(request.entries) != 6:
        raise HTTPException(status_code=400, detail="entries must hold six values: a b x alpha beta gamma")
    values = _parse_all(request.entries)
    try:
        symbol = ThreeJArgs(*values)
        three_j = exact_3j(symbol, strict=request.strict)
        cg = cg_from_3j(symbol, strict=request.strict)
    except InvalidArgumentsError as e:
        if request.strict:
            raise _bad_request(e)
        zero = _exact_payload(ExactValue.zero())
        label = "(" + ",".join(request.entries[:3]) + ";" + ",".join(request.entries[3:]) + ")"
        return EvalResponse(symbol=label, selection_rules=False, three_j=zero, clebsch_gordan=zero)
    return EvalResponse(
        symbol=str(symbol),
        selection_rules=selection_rules(symbol),
        three_j=_exact_payload(three_j),
        clebsch_gordan=_exact_payload(cg),
    )


def process_screen_background(job_id: str, spec: ScreenSpec, method: str,
                              formats: List[str], render: Dict[str, Any]):
    """Solve and write one screen, recording progress on the job row"""
    db = SessionLocal()
    try:
        update_screen_job(db, job_id, status=JobStatus.PROCESSING.value,
                          message="Solving screen...", progress=20)

        u = solve_screen(spec, SolveMethod(method))
        update_screen_job(db, job_id, message="Writing files...", progress=70)

        out_dir = os.path.join(config.OUTPUT_DIR, job_id)
        paths = render_screen(u, out_dir, formats, RenderConfig(**render))

        update_screen_job(
            db,
            job_id,
            status=JobStatus.COMPLETED.value,
            message=f"Wrote {len(paths)} file(s) for {spec.label()}",
            progress=100,
            outputs=",".join(paths),
            completed_at=datetime.now(),
        )
        logger.info("job %s completed", job_id)
    except Exception as e:
        logger.exception("job %s failed", job_id)
        update_screen_job(
            db,
            job_id,
            status=JobStatus.FAILED.value,
            message="Screen failed",
            error=str(e),
            completed_at=datetime.now(),
        )
    finally:
        db.close()


@app.post("/screens", response_model=ScreenStartResponse)
async def start_screen(request: ScreenRequest, background_tasks: BackgroundTasks,
                       db: Session = Depends(get_db)):
    """Validate now, solve in the background; poll /status/{job_id}"""
    a, b, sigma = _parse_all([request.a, request.b, request.sigma])
    try:
        spec, _ = canonicalize(ScreenSpec(a, b, sigma))
        render = RenderConfig(
            floor=request.floor,
            ceiling=request.ceiling,
            overlay=request.overlay,
            colormap=request.colormap,
            scale=request.scale,
            doubled_ints=request.doubled_ints,
        )
    except (ThreeJError, ValidationError) as e:
        raise _bad_request(e)

    job_id = str(uuid.uuid4())
    create_screen_job(
        db,
        job_id=job_id,
        a=request.a,
        b=request.b,
        sigma=request.sigma,
        method=request.method.value,
        canonical=spec.label(),
        status=JobStatus.PENDING.value,
    )
    background_tasks.add_task(
        process_screen_background,
        job_id,
        spec,
        request.method.value,
        [f.value for f in request.formats],
        render.model_dump(),
    )
    return ScreenStartResponse(job_id=job_id, message=f"Screen {spec.label()} queued",
                               status=JobStatus.PENDING.value, canonical=spec.label())


@app.get("/status/{job_id}", response_model=StatusResponse)
async def check_status(job_id: str, db: Session = Depends(get_db)):
    job = get_screen_job(db, job_id)
    if not job:
        raise HTTPException(status_code=404, detail=f"Job '{job_id}' not found")
    return StatusResponse(**job.to_dict())


@app.get("/screens", response_model=JobsResponse)
async def list_screens(limit: int = 20, db: Session = Depends(get_db)):
    return JobsResponse(jobs=[StatusResponse(**job.to_dict()) for job in list_screen_jobs(db, limit)])


@app.post("/caustics", response_model=CausticsResponse)
async def caustics(request: CausticRequest):
    J1, J2 = _parse_all([request.J1, request.J2])
    sigmas = _parse_all(request.sigmas) if request.sigmas else list(caustic_sigmas(J1, J2))
    try:
        geoms = [GeomSpec(J1, J2, sigma) for sigma in sigmas]
    except ValueError as e:
        raise _bad_request(e)

    panels = []
    for geom in geoms:
        curve = trace_caustic(geom)
        point = cusp_point(geom)
        panels.append(CausticPanel(
            sigma=str(geom.sigma),
            cusp=curve.cusp_flag,
            cusp_point=list(point) if point else None,
            samples=[list(s) for s in curve.samples],
        ))
    return CausticsResponse(J1=str(J1), J2=str(J2), panels=panels)

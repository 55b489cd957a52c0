"""Stateless allocation service.

POST /allocate runs the library allocator on the request body and returns
the plan document; GET /healthz reports liveness. Malformed bodies get 400
with a machine-readable error object, infeasible budgets 422. Every request
is independent -- the service holds no state.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict, Field

from .allocation import AllocationConfig, allocate
from .errors import BudgetInfeasible, SegBudgetError


class AllocateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scores: list[float] = Field(min_length=1)
    budget: int
    k_min: int = 4
    k_max: int = 128
    epsilon: float = 1e-6


class AllocateResponse(BaseModel):
    budgets: list[int]
    stage: str
    b_base: int
    b_res: int
    total: int


def create_app() -> FastAPI:
    app = FastAPI(title="segbudget allocation service")

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "malformed_request", "detail": exc.errors()},
        )

    @app.post("/allocate", response_model=AllocateResponse)
    def allocate_endpoint(req: AllocateRequest):
        try:
            cfg = AllocationConfig(
                b_max=req.budget, k_min=req.k_min, k_max=req.k_max, epsilon=req.epsilon
            )
            plan = allocate(req.scores, cfg)
        except BudgetInfeasible as exc:
            return JSONResponse(
                status_code=422,
                content={"error": "budget_infeasible", "detail": str(exc)},
            )
        except (SegBudgetError, ValueError) as exc:
            return JSONResponse(
                status_code=400,
                content={"error": "invalid_request", "detail": str(exc)},
            )
        return AllocateResponse(
            budgets=list(plan.budgets),
            stage=plan.stage,
            b_base=plan.b_base,
            b_res=plan.b_res,
            total=plan.total,
        )

    @app.get("/healthz")
    def healthz():
        return PlainTextResponse("ok")

    return app


app = create_app()

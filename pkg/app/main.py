from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.routers import states, thresholds, traces

app = FastAPI(
    title="Homodyne g2",
    description="Second-order correlation g2(0) of Gaussian states, their "
    "antibunching thresholds and homodyne-based estimation.",
    version="0.1.1",
)

origins = [
    "http://localhost:3000",  # React plotting front ends
    "http://localhost:5173",  # Vite dev server
    "http://localhost:8080",  # Vue
    "http://127.0.0.1:3000",
    "http://127.0.0.1:5173",
    "http://127.0.0.1:8080",
]

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(states.router, prefix="/api/v1", tags=["states"])
app.include_router(thresholds.router, prefix="/api/v1", tags=["thresholds"])
app.include_router(traces.router, prefix="/api/v1", tags=["traces"])

// DOM wiring for the advisor. All decision numbers on screen come from the
// engine's HTTP API; this file only routes state changes into requests and
// responses into the panels.

import { ApiClient, ApiError, Cancelled } from "./api.js";
import { buildChart, type ChartSeries } from "./chart.js";
import { formatAction, formatGamma, formatMoney } from "./format.js";
import {
  benefitAvailable,
  benefitRequest,
  currentRound,
  exportTrajectory,
  fromPreset,
  invertRequest,
  liveRemaining,
  newSession,
  recordOffer,
  SessionError,
  solveRequest,
  solveRequestAt,
  thresholdsRequest,
  toggleOpened,
  type BankerChoice,
  type Session,
} from "./session.js";
import type {
  BenefitResponse,
  DatasetsResponse,
  InvertResponse,
  SolveResponse,
  ThresholdsResponse,
} from "./types.js";

const api = new ApiClient("");

interface AppState {
  session: Session | null;
  gamma: number;
  overlays: number[];
  banker: BankerChoice;
  whatIf: BankerChoice | "none";
  datasets: DatasetsResponse | null;
}

const state: AppState = {
  session: null,
  gamma: 1.0,
  overlays: [],
  banker: "calibrated",
  whatIf: "none",
  datasets: null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLDivElement>("status");
  status.textContent = text;
  status.className = isError ? "status error" : "status";
}

function reportError(err: unknown): void {
  if (err instanceof Cancelled) return;
  if (err instanceof ApiError) {
    const where = err.round !== undefined ? ` (round ${err.round + 1})` : "";
    setStatus(`${err.code}: ${err.message}${where}`, true);
  } else if (err instanceof SessionError) {
    setStatus(err.message, true);
  } else {
    setStatus(String(err), true);
    console.error(err);
  }
}

// --- board rendering --------------------------------------------------------

function renderBoard(): void {
  const board = el<HTMLDivElement>("board");
  board.innerHTML = "";
  if (!state.session) return;
  const session = state.session;
  const current = new Set(currentRound(session).remaining);
  const staged = new Set(session.pendingOpened);
  for (const prize of session.rounds[0]!.remaining) {
    const chip = document.createElement("button");
    chip.type = "button";
    chip.textContent = formatMoney(prize);
    chip.className = "prize";
    if (!current.has(prize)) chip.classList.add("gone");
    else if (staged.has(prize)) chip.classList.add("staged");
    chip.addEventListener("click", () => {
      if (!current.has(prize)) return;
      try {
        state.session = toggleOpened(session, prize);
        renderAll();
      } catch (err) {
        reportError(err);
      }
    });
    board.appendChild(chip);
  }
  const live = liveRemaining(session);
  el<HTMLSpanElement>("board-live").textContent =
    `${live.length} in play: ${live.map(formatMoney).join(", ")}`;
}

// --- advice -----------------------------------------------------------------

function renderGammaTicks(breakpoints: number[]): void {
  const ticks = el<HTMLDataListElement>("gamma-ticks");
  ticks.innerHTML = "";
  for (const b of breakpoints) {
    const option = document.createElement("option");
    option.value = b.toFixed(5);
    option.label = `threshold ${formatGamma(b)}`;
    ticks.appendChild(option);
  }
  el<HTMLSpanElement>("advice-threshold").textContent = breakpoints.length
    ? breakpoints.map(formatGamma).join(", ")
    : "none in range";
}

async function refreshAdvice(): Promise<void> {
  const session = state.session;
  const panel = el<HTMLDivElement>("advice");
  if (!session || currentRound(session).offer === null) {
    panel.classList.add("disabled");
    return;
  }
  panel.classList.remove("disabled");

  const solve = api.post<SolveResponse>(
    "/api/solve",
    solveRequest(session, state.gamma, state.banker),
    "advice"
  );
  const thresholds = api.post<ThresholdsResponse>(
    "/api/thresholds",
    thresholdsRequest(session, state.banker),
    "thresholds"
  );

  try {
    const result = await solve;
    el<HTMLSpanElement>("advice-action").textContent = formatAction(result.action);
    el<HTMLSpanElement>("advice-action").dataset.action = result.action;
    el<HTMLSpanElement>("advice-offer").textContent = formatMoney(result.offer);
    el<HTMLSpanElement>("advice-ce").textContent = formatMoney(result.ce_nodeal);
  } catch (err) {
    reportError(err);
  }
  try {
    renderGammaTicks((await thresholds).breakpoints);
  } catch (err) {
    reportError(err);
  }

  // bound so far: exactly what `invert` would print for the exported file
  try {
    if (session.rounds.length > 1) {
      const bounds = await api.post<InvertResponse>("/api/invert", invertRequest(session), "bound");
      el<HTMLSpanElement>("advice-bound").textContent =
        bounds.upper_bound !== null
          ? `gamma < ${formatGamma(bounds.upper_bound)}`
          : bounds.intersection.length
            ? bounds.intersection.map(([a, b]) => `${formatGamma(a)}..${formatGamma(b)}`).join(", ")
            : "infeasible for gamma > 0";
    } else {
      el<HTMLSpanElement>("advice-bound").textContent = "need a completed round";
    }
  } catch (err) {
    reportError(err);
  }

  const benefitRow = el<HTMLDivElement>("benefit-row");
  if (benefitAvailable(session)) {
    benefitRow.classList.remove("hidden");
    try {
      const benefit = await api.post<BenefitResponse>(
        "/api/benefit",
        benefitRequest(session, state.gamma),
        "benefit"
      );
      el<HTMLSpanElement>("benefit-value").textContent = formatMoney(benefit.benefit);
    } catch (err) {
      reportError(err);
    }
  } else {
    benefitRow.classList.add("hidden");
  }
}

// --- chart ------------------------------------------------------------------

async function refreshChart(): Promise<void> {
  const session = state.session;
  const host = el<HTMLDivElement>("chart");
  if (!session) {
    host.innerHTML = "";
    return;
  }
  const played = session.rounds
    .map((r, i) => ({ round: r, index: i }))
    .filter(({ round }) => round.offer !== null);
  if (played.length === 0) {
    host.innerHTML = "";
    return;
  }
  const gammas = [state.gamma, ...state.overlays];
  try {
    const responses = await Promise.all(
      played.map(({ index }) =>
        api.post<SolveResponse>(
          "/api/solve",
          solveRequestAt(session, index, gammas, state.banker),
          `chart-${index}`
        )
      )
    );
    const series: ChartSeries[] = gammas.map((g, gi) => ({
      label: `ce γ=${g}`,
      values: responses.map((r) => r.gamma_results?.[gi]?.ce_nodeal ?? null),
    }));

    if (state.whatIf !== "none") {
      const alt = await Promise.all(
        played.map(({ index }) =>
          api.post<SolveResponse>(
            "/api/solve",
            solveRequestAt(session, index, [state.gamma], state.whatIf as BankerChoice),
            `chart-alt-${index}`
          )
        )
      );
      series.push({
        label: `γ=${state.gamma} (${state.whatIf === "expected_value" ? "ev" : state.whatIf})`,
        values: alt.map((r) => r.gamma_results?.[0]?.ce_nodeal ?? null),
        dashed: true,
      });
    }

    host.innerHTML = buildChart({
      roundLabels: played.map(({ index }) => index + 1),
      offers: played.map(({ round }) => round.offer),
      series,
    });
  } catch (err) {
    reportError(err);
  }
}

function renderOverlays(): void {
  const hostNode = el<HTMLDivElement>("overlays");
  hostNode.innerHTML = "";
  state.overlays.forEach((g, i) => {
    const chip = document.createElement("button");
    chip.type = "button";
    chip.className = "overlay-chip";
    chip.textContent = `γ=${g} ✕`;
    chip.addEventListener("click", () => {
      state.overlays.splice(i, 1);
      renderAll();
    });
    hostNode.appendChild(chip);
  });
}

function renderAll(): void {
  renderBoard();
  renderOverlays();
  void refreshAdvice();
  void refreshChart();
}

// --- wiring -----------------------------------------------------------------

async function loadDatasets(): Promise<void> {
  try {
    state.datasets = await api.get<DatasetsResponse>("/api/datasets");
    const select = el<HTMLSelectElement>("preset-select");
    select.innerHTML = "";
    for (const d of state.datasets.datasets) {
      const option = document.createElement("option");
      option.value = d.name;
      option.textContent = `${d.contestant} (${d.rounds} rounds)`;
      select.appendChild(option);
    }
  } catch (err) {
    reportError(err);
  }
}

function loadPreset(step?: number): void {
  if (!state.datasets) return;
  const name = el<HTMLSelectElement>("preset-select").value;
  const entry = state.datasets.datasets.find((d) => d.name === name);
  if (!entry) return;
  const stepInput = el<HTMLInputElement>("preset-step");
  const chosen = step ?? Number(stepInput.value || entry.rounds);
  try {
    state.session = fromPreset(entry.name, entry.trajectory, chosen);
    stepInput.value = String(chosen);
    setStatus(`${entry.contestant}, stepped to round ${chosen}`);
    renderAll();
  } catch (err) {
    reportError(err);
  }
}

function init(): void {
  void loadDatasets();

  el<HTMLButtonElement>("board-start").addEventListener("click", () => {
    const raw = el<HTMLInputElement>("board-input").value;
    try {
      const values = raw.split(",").map((s) => Number(s.trim())).filter((s) => s === s);
      state.session = newSession(values);
      setStatus(`new board with ${values.length} prizes`);
      renderAll();
    } catch (err) {
      reportError(err);
    }
  });

  el<HTMLButtonElement>("preset-load").addEventListener("click", () => loadPreset());
  el<HTMLButtonElement>("preset-next").addEventListener("click", () => {
    const session = state.session;
    if (!session || !session.presetRounds) return;
    const next = Math.min(session.rounds.length + 1, session.presetRounds.length);
    loadPreset(next);
  });

  el<HTMLButtonElement>("offer-commit").addEventListener("click", () => {
    const session = state.session;
    if (!session) return;
    try {
      state.session = recordOffer(session, Number(el<HTMLInputElement>("offer-input").value));
      el<HTMLInputElement>("offer-input").value = "";
      renderAll();
    } catch (err) {
      reportError(err);
    }
  });

  const slider = el<HTMLInputElement>("gamma-slider");
  slider.addEventListener("input", () => {
    state.gamma = Number(slider.value);
    el<HTMLSpanElement>("gamma-value").textContent = state.gamma.toFixed(2);
    void refreshAdvice();
    void refreshChart();
  });

  el<HTMLButtonElement>("overlay-add").addEventListener("click", () => {
    const value = Number(el<HTMLInputElement>("overlay-input").value);
    if (Number.isFinite(value)) {
      state.overlays.push(value);
      renderAll();
    }
  });

  el<HTMLSelectElement>("banker-select").addEventListener("change", (event) => {
    state.banker = (event.target as HTMLSelectElement).value as BankerChoice;
    renderAll();
  });
  el<HTMLSelectElement>("whatif-select").addEventListener("change", (event) => {
    state.whatIf = (event.target as HTMLSelectElement).value as AppState["whatIf"];
    void refreshChart();
  });

  el<HTMLButtonElement>("export-button").addEventListener("click", () => {
    const session = state.session;
    if (!session) return;
    try {
      const doc = JSON.stringify(exportTrajectory(session), null, 2);
      el<HTMLTextAreaElement>("export-output").value = doc;
      const blob = new Blob([doc], { type: "application/json" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `${session.source}-session.json`;
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (err) {
      reportError(err);
    }
  });
}

document.addEventListener("DOMContentLoaded", init);

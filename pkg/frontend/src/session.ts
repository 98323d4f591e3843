// Client-side game session: the board, the opened cases, the offers typed
// in so far. Mirrors the trajectory invariants (strict subset nesting,
// positive prizes) and serializes to the exact trajectory JSON schema, so
// an exported session can be replayed through the invert CLI.

import type {
  BankerDescriptor,
  InvertRequest,
  SolveRequest,
  ThresholdsRequest,
  TrajectoryDoc,
  UtilityDescriptor,
} from "./types.js";

export interface SessionRound {
  remaining: number[]; // ascending
  offer: number | null;
}

export type BankerChoice = "calibrated" | "expected_value" | "online";

export interface Session {
  source: string; // "manual" or the preset name
  currency: string;
  rounds: SessionRound[]; // committed offer points; last entry is current
  pendingOpened: number[]; // cases opened since the last offer point
  // full preset record, when one was loaded: offers beyond the current
  // step still calibrate the banker, as a replay knows the whole game
  presetRounds: SessionRound[] | null;
}

export class SessionError extends Error {}

function ascending(values: number[]): number[] {
  return [...values].sort((a, b) => a - b);
}

function validateBoard(values: number[]): number[] {
  if (values.length < 1) {
    throw new SessionError("enter at least one prize");
  }
  for (const v of values) {
    if (!Number.isFinite(v) || v <= 0) {
      throw new SessionError(`prizes must be positive numbers, got ${v}`);
    }
  }
  if (new Set(values).size !== values.length) {
    throw new SessionError("prizes must be distinct");
  }
  return ascending(values);
}

export function newSession(board: number[]): Session {
  return {
    source: "manual",
    currency: "EUR",
    rounds: [{ remaining: validateBoard(board), offer: null }],
    pendingOpened: [],
    presetRounds: null,
  };
}

export function fromPreset(name: string, doc: TrajectoryDoc, step: number): Session {
  if (step < 1 || step > doc.rounds.length) {
    throw new SessionError(
      `step must be between 1 and ${doc.rounds.length}, got ${step}`
    );
  }
  const presetRounds = doc.rounds.map((r) => ({
    remaining: validateBoard(r.remaining),
    offer: r.offer ?? null,
  }));
  return {
    source: name,
    currency: doc.currency,
    rounds: presetRounds.slice(0, step).map((r) => ({ ...r, remaining: [...r.remaining] })),
    pendingOpened: [],
    presetRounds,
  };
}

export function currentRound(session: Session): SessionRound {
  const round = session.rounds[session.rounds.length - 1];
  if (!round) throw new SessionError("session has no rounds");
  return round;
}

/** Prizes still in play right now (current round minus staged openings). */
export function liveRemaining(session: Session): number[] {
  const staged = new Set(session.pendingOpened);
  return currentRound(session).remaining.filter((p) => !staged.has(p));
}

export function toggleOpened(session: Session, prize: number): Session {
  const round = currentRound(session);
  if (!round.remaining.includes(prize)) {
    throw new SessionError(`prize ${prize} is not on the board this round`);
  }
  const staged = session.pendingOpened.includes(prize);
  if (!staged && session.pendingOpened.length >= round.remaining.length - 1) {
    throw new SessionError("the contestant's own case stays shut: one prize must remain");
  }
  const pendingOpened = staged
    ? session.pendingOpened.filter((p) => p !== prize)
    : [...session.pendingOpened, prize];
  return { ...session, pendingOpened };
}

/**
 * Record the banker's offer at the current board. With staged openings this
 * commits a new offer point (the previous round implicitly became No Deal);
 * with none it sets or corrects the current round's offer.
 */
export function recordOffer(session: Session, offer: number): Session {
  if (!Number.isFinite(offer) || offer <= 0) {
    throw new SessionError(`the offer must be a positive amount, got ${offer}`);
  }
  if (session.pendingOpened.length === 0) {
    const rounds = session.rounds.map((r, i) =>
      i === session.rounds.length - 1 ? { ...r, offer } : r
    );
    return { ...session, rounds };
  }
  const previous = currentRound(session);
  if (previous.offer === null) {
    throw new SessionError("enter the current round's offer before opening cases");
  }
  const remaining = liveRemaining(session);
  return {
    ...session,
    rounds: [...session.rounds, { remaining, offer }],
    pendingOpened: [],
  };
}

// ---------------------------------------------------------------------------
// Requests. All numbers shown in the UI come back from these endpoints.
// ---------------------------------------------------------------------------

function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

function calibrationRounds(session: Session): SessionRound[] {
  return session.presetRounds ?? session.rounds;
}

/** Offer/mean ratios of every known offer, as a multiplier-banker descriptor. */
export function bankerDescriptor(
  session: Session,
  choice: BankerChoice
): BankerDescriptor {
  if (choice === "expected_value") return { type: "expected_value" };
  if (choice === "online") return { type: "online" };
  const multipliers = calibrationRounds(session)
    .filter((r) => r.offer !== null)
    .map((r) => (r.offer as number) / mean(r.remaining));
  if (multipliers.length === 0) {
    throw new SessionError("no offers recorded yet: nothing to calibrate from");
  }
  return { type: "multipliers", multipliers, extrapolation: "hold_last" };
}

/** Opens per offer point, padded with the standard one-at-a-time end game. */
export function scheduleFor(session: Session): number[] {
  const opens: number[] = [];
  for (let i = 1; i < session.rounds.length; i++) {
    const prev = session.rounds[i - 1]!;
    const cur = session.rounds[i]!;
    opens.push(prev.remaining.length - cur.remaining.length);
  }
  const lastSize = currentRound(session).remaining.length;
  for (let i = 0; i < lastSize - 1; i++) opens.push(1);
  return opens;
}

export function utilityDescriptor(gamma: number): UtilityDescriptor {
  return { type: "crra", gamma };
}

export function solveRequest(
  session: Session,
  gamma: number,
  choice: BankerChoice,
  gammaGrid?: number[]
): SolveRequest {
  const request: SolveRequest = {
    ladder: session.rounds[0]!.remaining,
    remaining: currentRound(session).remaining,
    schedule: scheduleFor(session),
    banker: bankerDescriptor(session, choice),
    utility: utilityDescriptor(gamma),
  };
  if (gammaGrid && gammaGrid.length > 0) request.gamma_grid = gammaGrid;
  return request;
}

/** Solve request for an already-played offer point (chart series). */
export function solveRequestAt(
  session: Session,
  roundIndex: number,
  gammaGrid: number[],
  choice: BankerChoice
): SolveRequest {
  const round = session.rounds[roundIndex];
  if (!round) throw new SessionError(`no round ${roundIndex}`);
  return {
    ladder: session.rounds[0]!.remaining,
    remaining: round.remaining,
    schedule: scheduleFor(session),
    banker: bankerDescriptor(session, choice),
    utility: utilityDescriptor(1.0),
    gamma_grid: gammaGrid,
  };
}

export function thresholdsRequest(
  session: Session,
  choice: BankerChoice
): ThresholdsRequest {
  return {
    ladder: session.rounds[0]!.remaining,
    remaining: currentRound(session).remaining,
    schedule: scheduleFor(session),
    banker: bankerDescriptor(session, choice),
  };
}

/**
 * The session as a trajectory document. Every round before the current one
 * was answered No Deal (the game went on); the current round's decision is
 * what the advisor is for, so it stays open.
 */
export function exportTrajectory(session: Session): TrajectoryDoc {
  const rounds = session.rounds.map((r, i) => {
    const doc: { remaining: number[]; offer?: number; decision?: "deal" | "no_deal" } = {
      remaining: [...r.remaining],
    };
    if (r.offer !== null) doc.offer = r.offer;
    if (i < session.rounds.length - 1) {
      if (r.offer === null) {
        throw new SessionError(`round ${i + 1} has no offer; cannot export a decision for it`);
      }
      doc.decision = "no_deal";
    }
    return doc;
  });
  return {
    contestant: session.source === "manual" ? "session" : session.source,
    currency: session.currency,
    rounds,
  };
}

/** Bound-so-far request: banker omitted on purpose, matching the invert CLI. */
export function invertRequest(session: Session): InvertRequest {
  return { trajectory: exportTrajectory(session) };
}

export function benefitAvailable(session: Session): boolean {
  const round = currentRound(session);
  return round.remaining.length === 2 && round.offer !== null;
}

export function benefitRequest(session: Session, gamma: number) {
  const round = currentRound(session);
  if (!benefitAvailable(session)) {
    throw new SessionError("the benefit explorer needs a two-prize round with an offer");
  }
  return { offer: round.offer as number, prizes: round.remaining, gamma };
}

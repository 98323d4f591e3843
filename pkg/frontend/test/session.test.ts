import { describe, expect, it } from "vitest";

import {
  bankerDescriptor,
  benefitAvailable,
  benefitRequest,
  currentRound,
  exportTrajectory,
  fromPreset,
  invertRequest,
  liveRemaining,
  newSession,
  recordOffer,
  scheduleFor,
  SessionError,
  solveRequest,
  solveRequestAt,
  thresholdsRequest,
  toggleOpened,
} from "../src/session.js";
import type { TrajectoryDoc } from "../src/types.js";

const MINI_PRESET: TrajectoryDoc = {
  contestant: "Mini",
  currency: "EUR",
  rounds: [
    { remaining: [0.5, 1000, 100000, 150000], offer: 46000, decision: "no_deal" },
    { remaining: [1000, 100000, 150000], offer: 75300, decision: "no_deal" },
    { remaining: [100000, 150000], offer: 125000, decision: "no_deal" },
  ],
};

describe("board entry", () => {
  it("sorts and validates the board", () => {
    const session = newSession([750, 500, 25]);
    expect(currentRound(session).remaining).toEqual([25, 500, 750]);
  });

  it("rejects bad boards", () => {
    expect(() => newSession([])).toThrow(SessionError);
    expect(() => newSession([5, -1])).toThrow(SessionError);
    expect(() => newSession([5, 5])).toThrow(SessionError);
    expect(() => newSession([5, NaN])).toThrow(SessionError);
  });
});

describe("round stepping", () => {
  it("stages openings, then an offer commits the next round", () => {
    let session = newSession([750, 500, 25]);
    session = recordOffer(session, 425);
    session = toggleOpened(session, 500);
    expect(liveRemaining(session)).toEqual([25, 750]);
    session = recordOffer(session, 278.75);
    expect(session.rounds).toHaveLength(2);
    expect(currentRound(session).remaining).toEqual([25, 750]);
    expect(session.pendingOpened).toEqual([]);
  });

  it("toggling twice undoes a staged opening", () => {
    let session = newSession([750, 500, 25]);
    session = toggleOpened(session, 500);
    session = toggleOpened(session, 500);
    expect(liveRemaining(session)).toEqual([25, 500, 750]);
  });

  it("never lets the last prize be opened", () => {
    let session = newSession([10, 20]);
    session = toggleOpened(session, 10);
    expect(() => toggleOpened(session, 20)).toThrow(SessionError);
  });

  it("rejects prizes that are not in play", () => {
    const session = newSession([10, 20]);
    expect(() => toggleOpened(session, 999)).toThrow(SessionError);
  });

  it("requires an offer before cases open into a new round", () => {
    let session = newSession([750, 500, 25]);
    session = toggleOpened(session, 500);
    expect(() => recordOffer(session, 300)).toThrow(SessionError);
  });

  it("corrects the current offer when nothing is staged", () => {
    let session = newSession([10, 20]);
    session = recordOffer(session, 14);
    session = recordOffer(session, 15);
    expect(currentRound(session).offer).toBe(15);
    expect(session.rounds).toHaveLength(1);
  });

  it("rejects non-positive offers", () => {
    const session = newSession([10, 20]);
    expect(() => recordOffer(session, 0)).toThrow(SessionError);
  });
});

describe("presets", () => {
  it("steps to the requested round", () => {
    const session = fromPreset("mini", MINI_PRESET, 3);
    expect(currentRound(session).remaining).toEqual([100000, 150000]);
    expect(session.rounds).toHaveLength(3);
  });

  it("rejects out-of-range steps", () => {
    expect(() => fromPreset("mini", MINI_PRESET, 0)).toThrow(SessionError);
    expect(() => fromPreset("mini", MINI_PRESET, 4)).toThrow(SessionError);
  });

  it("calibrates the banker from the whole preset even mid-replay", () => {
    const session = fromPreset("mini", MINI_PRESET, 2);
    const banker = bankerDescriptor(session, "calibrated");
    expect(banker.type).toBe("multipliers");
    if (banker.type === "multipliers") {
      expect(banker.multipliers).toHaveLength(3);
      expect(banker.multipliers[2]).toBeCloseTo(1.0, 12);
    }
  });
});

describe("requests", () => {
  it("derives the schedule and pads the end game", () => {
    let session = newSession([1, 2, 3, 4, 5]);
    session = recordOffer(session, 3);
    session = toggleOpened(session, 1);
    session = toggleOpened(session, 2);
    session = recordOffer(session, 4);
    expect(scheduleFor(session)).toEqual([2, 1, 1]);
  });

  it("builds a solve request over the original board", () => {
    const session = fromPreset("mini", MINI_PRESET, 2);
    const request = solveRequest(session, 1.0, "calibrated");
    expect(request.ladder).toEqual([0.5, 1000, 100000, 150000]);
    expect(request.remaining).toEqual([1000, 100000, 150000]);
    expect(request.schedule).toEqual([1, 1, 1]);
    expect(request.utility).toEqual({ type: "crra", gamma: 1.0 });
    expect(request.banker?.type).toBe("multipliers");
  });

  it("builds per-round chart requests with a gamma grid", () => {
    const session = fromPreset("mini", MINI_PRESET, 3);
    const request = solveRequestAt(session, 0, [0, 1, 2.5], "calibrated");
    expect(request.remaining).toEqual([0.5, 1000, 100000, 150000]);
    expect(request.gamma_grid).toEqual([0, 1, 2.5]);
  });

  it("thresholds request shares the solve geometry", () => {
    const session = fromPreset("mini", MINI_PRESET, 2);
    const solve = solveRequest(session, 1.0, "online");
    const thresholds = thresholdsRequest(session, "online");
    expect(thresholds.ladder).toEqual(solve.ladder);
    expect(thresholds.remaining).toEqual(solve.remaining);
    expect(thresholds.schedule).toEqual(solve.schedule);
    expect(thresholds.banker).toEqual({ type: "online" });
  });

  it("calibration requires at least one offer", () => {
    const session = newSession([10, 20]);
    expect(() => bankerDescriptor(session, "calibrated")).toThrow(SessionError);
  });
});

describe("export", () => {
  it("serializes the exact trajectory schema with pending last round", () => {
    const session = fromPreset("mini", MINI_PRESET, 2);
    const doc = exportTrajectory(session);
    expect(Object.keys(doc).sort()).toEqual(["contestant", "currency", "rounds"]);
    expect(doc.rounds).toEqual([
      { remaining: [0.5, 1000, 100000, 150000], offer: 46000, decision: "no_deal" },
      { remaining: [1000, 100000, 150000], offer: 75300 },
    ]);
    expect(invertRequest(session)).toEqual({ trajectory: doc });
  });

  it("remaining sets nest strictly after manual play", () => {
    let session = newSession([750, 500, 25]);
    session = recordOffer(session, 425);
    session = toggleOpened(session, 500);
    session = recordOffer(session, 278.75);
    const doc = exportTrajectory(session);
    for (let i = 1; i < doc.rounds.length; i++) {
      const prev = new Set(doc.rounds[i - 1]!.remaining);
      const cur = doc.rounds[i]!.remaining;
      expect(cur.length).toBeLessThan(prev.size);
      for (const p of cur) expect(prev.has(p)).toBe(true);
    }
  });

  it("refuses to export a decided round without an offer", () => {
    // reach a two-round session whose first round lost its offer
    const session = fromPreset("mini", MINI_PRESET, 2);
    session.rounds[0]!.offer = null;
    expect(() => exportTrajectory(session)).toThrow(SessionError);
  });
});

describe("benefit explorer", () => {
  it("activates only on a two-prize round with an offer", () => {
    const two = fromPreset("mini", MINI_PRESET, 3);
    expect(benefitAvailable(two)).toBe(true);
    expect(benefitRequest(two, 1.0)).toEqual({
      offer: 125000,
      prizes: [100000, 150000],
      gamma: 1.0,
    });
    const three = fromPreset("mini", MINI_PRESET, 2);
    expect(benefitAvailable(three)).toBe(false);
    expect(() => benefitRequest(three, 1.0)).toThrow(SessionError);
  });
});

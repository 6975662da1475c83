// Client-side round state: a pure reducer over server messages plus the bits
// of local UI state (selected cell, follow toggle, history). No game logic
// lives here; the store only mirrors what the server said.

import type {
  Phase,
  RoundResultPayload,
  RoundView,
  ServerMessage,
  SuggestionPayload,
  SummaryPayload,
} from "./types";

export interface HistoryPoint {
  t: number;
  ubar: string;
  xbar: string;
  gain: string;
}

export class RoundStore {
  view: RoundView | null = null;
  suggestion: SuggestionPayload | null = null;
  lastResult: RoundResultPayload | null = null;
  summary: SummaryPayload | null = null;
  selected: number | null = null;
  followSuggestion = true;
  submitting = false;
  error: string | null = null;
  history: HistoryPoint[] = [];
  private listeners: (() => void)[] = [];

  get phase(): Phase | null {
    return this.view?.phase ?? null;
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  apply(message: ServerMessage): void {
    switch (message.type) {
      case "round_start":
        this.applyView(message.payload);
        break;
      case "suggestion":
        this.suggestion = message.payload;
        if (this.view && this.view.t === message.payload.t) {
          this.view = { ...this.view, phase: "suggestion_ready" };
        }
        this.submitting = false;
        break;
      case "round_result":
        this.lastResult = message.payload;
        break;
      case "summary":
        this.summary = message.payload;
        if (this.view) this.view = { ...this.view, phase: "round_closed" };
        break;
    }
    this.emit();
  }

  applyView(view: RoundView): void {
    this.view = view;
    this.suggestion = null;
    this.selected = null;
    this.submitting = false;
    this.error = null;
    const last = this.history[this.history.length - 1];
    if (!last || last.t !== view.t) {
      this.history.push({ t: view.t, ubar: view.ubar, xbar: view.xbar,
                          gain: view.gain });
    }
    this.emit();
  }

  select(action: number): boolean {
    if (!this.canSelect(action)) return false;
    this.selected = action;
    this.emit();
    return true;
  }

  canSelect(action: number): boolean {
    return (this.phase === "awaiting_baseline" && !this.submitting &&
            (this.view?.allowed_actions ?? []).includes(action));
  }

  get canSubmit(): boolean {
    return (this.phase === "awaiting_baseline" && this.selected !== null &&
            !this.submitting);
  }

  get canAdvance(): boolean {
    return this.phase === "suggestion_ready";
  }

  markSubmitting(): void {
    this.submitting = true;
    this.emit();
  }

  submitFailed(message: string): void {
    // server rejected the baseline: surface the reason, re-enable selection
    this.submitting = false;
    this.error = message;
    this.emit();
  }

  toggleFollow(value: boolean): void {
    this.followSuggestion = value;
    this.emit();
  }

  setError(message: string | null): void {
    this.error = message;
    this.emit();
  }

  /** Cells to draw: everything the server has ever named for this session. */
  gridCells(): number[] {
    const cells = new Set<number>();
    for (const action of this.view?.allowed_actions ?? []) cells.add(action);
    for (const key of Object.keys(this.view?.visible ?? {})) cells.add(Number(key));
    if (this.lastResult) {
      for (let m = 1; m <= this.lastResult.omega.length; m += 1) cells.add(m);
    }
    return [...cells].sort((a, b) => a - b);
  }
}

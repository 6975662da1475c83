// Payload shapes of the session service. Float quantities arrive as decimal
// strings at full precision and are rendered verbatim; the client never does
// arithmetic on utilities.

export type Phase = "awaiting_baseline" | "suggestion_ready" | "round_closed";

export interface RoundView {
  t: number;
  phase: Phase;
  horizon: number;
  player: number;
  visible: Record<string, string>;
  allowed_actions: number[];
  ubar: string;
  xbar: string;
  gain: string;
}

export interface CreateSessionResponse {
  session_id: string;
  human_player: number;
  horizon: number;
  num_players: number;
  view: RoundView;
}

export interface SuggestionPayload {
  t: number;
  suggestion: number;
  u: string;
  x: string;
}

export interface RoundResultPayload {
  t: number;
  omega: string[];
  b: number[];
  alpha: number[];
  u: string[];
  x: string[];
  followed: boolean;
}

export interface SummaryPayload {
  t: number;
  rounds_played: number;
  horizon: number;
  ubar: string;
  xbar: string;
  gain: string;
  complete: boolean;
}

export interface BaselineAck {
  status: string;
  t: number;
  phase: Phase;
}

export interface AdvanceResponse {
  result: RoundResultPayload | null;
  summary: SummaryPayload | null;
  view: RoundView;
}

export type ServerMessage =
  | { type: "round_start"; payload: RoundView }
  | { type: "suggestion"; payload: SuggestionPayload }
  | { type: "round_result"; payload: RoundResultPayload }
  | { type: "summary"; payload: SummaryPayload };

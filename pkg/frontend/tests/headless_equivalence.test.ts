// End-to-end against the real service: a scripted session must leave exactly
// the same trace file as the equivalent headless run, and nothing the server
// pushes before a round closes may contain a hidden event coordinate.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionClient } from "../src/client";
import type { ServerMessage } from "../src/types";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const FIXTURE = path.join(HERE, "fixtures", "session_scenario.json");
const HUMAN_ACTIONS = [1, 2, 2, 1, 2, 2];
// hidden coordinate values (binary-exact, so their decimal strings are stable)
const HIDDEN_LITERALS = ["7.5", "8.25"];

const port = 21000 + Math.floor(Math.random() * 20000);
const baseUrl = `http://127.0.0.1:${port}`;
let server: ChildProcess;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      await fetch(`${baseUrl}/sessions/probe/view?player=1`);
      return;
    } catch {
      await sleep(150);
    }
  }
  throw new Error("session service did not come up");
}

class MessageLog {
  received: ServerMessage[] = [];
  private cursor = 0;

  push(message: ServerMessage): void {
    this.received.push(message);
  }

  async expect(type: ServerMessage["type"]): Promise<ServerMessage> {
    const deadline = Date.now() + 15_000;
    while (Date.now() < deadline) {
      while (this.cursor < this.received.length) {
        const message = this.received[this.cursor];
        this.cursor += 1;
        if (message.type === type) return message;
      }
      await sleep(5);
    }
    throw new Error(`timed out waiting for a ${type} message`);
  }
}

beforeAll(async () => {
  server = spawn("python3",
                 ["-m", "regret_manager.cli", "serve", FIXTURE,
                  "--player", "1", "--port", String(port)],
                 { stdio: ["ignore", "pipe", "pipe"] });
  await waitForServer();
});

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("scripted browser session", () => {
  it("leaves a byte-identical trace to the headless CLI run", async () => {
    const outDir = mkdtempSync(path.join(tmpdir(), "headless-"));
    const cli = spawnSync("python3",
                          ["-m", "regret_manager.cli", "run", FIXTURE,
                           "--out", outDir],
                          { encoding: "utf-8" });
    expect(cli.status, cli.stderr).toBe(0);
    const headless = readFileSync(path.join(outDir, "trace.csv"), "utf-8");

    const client = new SessionClient(baseUrl, { webSocketImpl: WebSocket as never });
    const log = new MessageLog();
    const created = await client.createSession({});
    expect(created.human_player).toBe(1);
    const socket = await client.connect(created.session_id,
                                        (message) => log.push(message));
    await log.expect("round_start");
    for (const action of HUMAN_ACTIONS) {
      await client.submitBaseline(created.session_id, 1, action);
      await log.expect("suggestion");
      const out = await client.advance(created.session_id, true);
      expect(out.result).not.toBeNull();
      await log.expect("round_result");
      await log.expect(out.summary ? "summary" : "round_start");
    }
    const served = await client.trace(created.session_id);
    socket.close();
    expect(served).toBe(headless);
    expect(served.split("\n").length).toBe(HUMAN_ACTIONS.length + 2);
  });

  it("never receives a hidden coordinate before the round closes", async () => {
    const transcript: string[] = [];
    const client = new SessionClient(baseUrl, {
      webSocketImpl: WebSocket as never,
      onRawMessage: (_origin, raw) => transcript.push(raw),
    });
    const log = new MessageLog();
    const scenario = JSON.parse(readFileSync(FIXTURE, "utf-8"));
    scenario.manager = null; // suggestions mirror baselines; utilities stay
    //                          derived from the visible coordinate only
    const created = await client.createSession({ scenario, human_player: 1 });
    const socket = await client.connect(created.session_id,
                                        (message) => log.push(message));
    await log.expect("round_start");

    for (let t = 0; t < HUMAN_ACTIONS.length; t += 1) {
      await client.view(created.session_id, 1);
      await client.submitBaseline(created.session_id, 1, 1);
      await log.expect("suggestion");
      const preClose = transcript.join("\n");
      for (const literal of HIDDEN_LITERALS) {
        expect(preClose, `round ${t} leaked ${literal}`).not.toContain(literal);
      }
      const out = await client.advance(created.session_id, false);
      await log.expect("round_result");
      await log.expect(out.summary ? "summary" : "round_start");
      // revealed payloads legitimately carry this round's hidden value
      const revealed = transcript.join("\n");
      expect(HIDDEN_LITERALS.some((lit) => revealed.includes(lit))).toBe(true);
      transcript.length = 0;
    }
    socket.close();
  });

  it("maps protocol rejections onto typed errors", async () => {
    const client = new SessionClient(baseUrl, { webSocketImpl: WebSocket as never });
    const created = await client.createSession({});
    await expect(client.submitBaseline(created.session_id, 1, 9))
      .rejects.toMatchObject({ code: "illegal_action", status: 400 });
    await expect(client.advance(created.session_id, true))
      .rejects.toMatchObject({ code: "wrong_phase", status: 409 });
    await expect(client.view(created.session_id, 2))
      .rejects.toMatchObject({ code: "not_human_seat", status: 403 });
    await expect(client.view("missing", 1))
      .rejects.toMatchObject({ status: 404 });
  });
});

import { describe, expect, it } from "vitest";

import { ApiClient, FetchLike, PipelineBody, SearchBody } from "../src/api.js";
import { AppController, canSubmit, initialState } from "../src/state.js";

function searchBody(query: string, ids: string[]): SearchBody {
  return {
    query,
    method: "dense",
    k: 5,
    results: ids.map((id, i) => ({ card_id: id, score: 1 - i * 0.1 })),
  };
}

function pipelineBody(query: string, ids: string[]): PipelineBody {
  return {
    query,
    method: "unionable",
    semantic_method: "dense",
    k: 5,
    cards: ids.map((id, i) => ({ card_id: id, score: 5 - i, table_ids: [`${id}::t0`] })),
    anchor_card_ids: ids.slice(0, 1),
    warnings: [],
  };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Route fetches by path; per-query deferral lets tests reorder responses. */
function fakeService(handler: (url: URL) => unknown): { fetch: FetchLike; calls: string[] } {
  const calls: string[] = [];
  const impl: FetchLike = (raw) => {
    calls.push(raw);
    const url = new URL(raw);
    const body = handler(url);
    if (body instanceof Error) {
      return Promise.reject(body);
    }
    if (body instanceof Promise) {
      return body.then((b) => jsonResponse(b));
    }
    return Promise.resolve(jsonResponse(body));
  };
  return { fetch: impl, calls };
}

function echoService() {
  return fakeService((url) => {
    const q = url.searchParams.get("q") ?? "";
    const ids = [`${q}/first`, `${q}/second`];
    return url.pathname === "/search" ? searchBody(q, ids) : pipelineBody(q, ids);
  });
}

describe("canSubmit", () => {
  it("rejects empty and whitespace-only queries", () => {
    expect(canSubmit("")).toBe(false);
    expect(canSubmit("   \t")).toBe(false);
    expect(canSubmit("mmlu")).toBe(true);
  });
});

describe("AppController.submitQuery", () => {
  it("fills both panels from one submission", async () => {
    const svc = echoService();
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.submitQuery("quant");
    const state = controller.getState();
    expect(state.unstructured?.results.map((r) => r.card_id)).toEqual([
      "quant/first",
      "quant/second",
    ]);
    expect(state.structured?.cards.map((c) => c.card_id)).toEqual(["quant/first", "quant/second"]);
    expect(state.error).toBeNull();
    expect(state.pending).toBe(false);
  });

  it("sends the same k to both endpoints", async () => {
    const svc = echoService();
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.submitQuery("quant", { k: 7 });
    const ks = svc.calls.map((raw) => new URL(raw).searchParams.get("k"));
    expect(svc.calls).toHaveLength(2);
    expect(ks).toEqual(["7", "7"]);
  });

  it("ignores blank submissions entirely", async () => {
    const svc = echoService();
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.submitQuery("   ");
    expect(svc.calls).toHaveLength(0);
    expect(controller.getState()).toEqual(initialState());
  });

  it("keeps the previous panels when the service errors", async () => {
    let fail = false;
    const svc = fakeService((url) => {
      if (fail) {
        return new Error("connect ECONNREFUSED");
      }
      const q = url.searchParams.get("q") ?? "";
      return url.pathname === "/search" ? searchBody(q, ["a"]) : pipelineBody(q, ["a"]);
    });
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.submitQuery("good");
    fail = true;
    await controller.submitQuery("bad");
    const state = controller.getState();
    expect(state.error).toContain("ECONNREFUSED");
    expect(state.unstructured?.query).toBe("good");
    expect(state.structured?.query).toBe("good");
    expect(state.pending).toBe(false);
  });

  it("reports the detail field of HTTP errors", async () => {
    const svc = fakeService(() => null);
    const failing: FetchLike = () =>
      Promise.resolve(jsonResponse({ detail: "unknown method 'x'" }, 400));
    void svc;
    const controller = new AppController(new ApiClient("http://svc", failing));
    await controller.submitQuery("q");
    expect(controller.getState().error).toContain("unknown method 'x'");
  });

  it("discards a stale response that finishes after a newer one", async () => {
    const gates = new Map<string, (body: unknown) => void>();
    const svc = fakeService((url) => {
      const q = url.searchParams.get("q") ?? "";
      const ids = [`${q}/hit`];
      const body = url.pathname === "/search" ? searchBody(q, ids) : pipelineBody(q, ids);
      if (q === "slow") {
        return new Promise((resolve) => {
          gates.set(url.pathname, resolve);
        }).then(() => body);
      }
      return body;
    });
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    const slow = controller.submitQuery("slow");
    await controller.submitQuery("fast");
    gates.get("/search")?.(null);
    gates.get("/pipeline")?.(null);
    await slow;
    const state = controller.getState();
    expect(state.unstructured?.query).toBe("fast");
    expect(state.structured?.query).toBe("fast");
    expect(state.query).toBe("fast");
  });
});

describe("AppController.openIntegration", () => {
  const integrated = {
    headers: ["model", "acc"],
    rows: [["m1", 70]],
    provenance: [["t1", "t1"]],
    source_ids: ["t1"],
    null_cells: 0,
    anchor: "t1",
    tables: [],
  };

  it("stores the integrated view", async () => {
    const svc = fakeService((url) => {
      expect(url.pathname).toBe("/integrate");
      expect(url.searchParams.get("anchor")).toBe("t1");
      expect(url.searchParams.get("tables")).toBe("t2,t3");
      return integrated;
    });
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.openIntegration("t1", ["t2", "t3"]);
    expect(controller.getState().integration).toEqual(integrated);
  });

  it("turns an unknown table into an inline error", async () => {
    const svc = echoService();
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.submitQuery("q");
    const failing = new AppController(
      new ApiClient("http://svc", () => Promise.resolve(jsonResponse({ detail: "no table 'ghost'" }, 404))),
    );
    await failing.openIntegration("ghost", []);
    expect(failing.getState().error).toContain("ghost");
    expect(failing.getState().integration).toBeNull();
    void controller;
  });
});

describe("AppController.scoreNuggets", () => {
  it("scores the structured panel's cards", async () => {
    const svc = fakeService((url) => {
      const q = url.searchParams.get("q") ?? "";
      if (url.pathname === "/nuggets/score") {
        expect(url.searchParams.get("cards")).toBe("q/first,q/second");
        return { query: q, cards: ["q/first", "q/second"], score: 3, constraint: {}, audit_id: "a" };
      }
      const ids = ["q/first", "q/second"];
      return url.pathname === "/search" ? searchBody(q, ids) : pipelineBody(q, ids);
    });
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.submitQuery("q");
    await controller.scoreNuggets();
    expect(controller.getState().nuggets?.score).toBe(3);
  });

  it("does nothing before a structured response exists", async () => {
    const svc = echoService();
    const controller = new AppController(new ApiClient("http://svc", svc.fetch));
    await controller.scoreNuggets();
    expect(svc.calls).toHaveLength(0);
  });
});

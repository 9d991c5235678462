import { describe, expect, it } from "vitest";

import { describeKind, severityPercent, TestFlow } from "../src/flow.js";
import { MockApi } from "./mock_api.js";

describe("TestFlow", () => {
  it("starts a session and loads the first plate", async () => {
    const api = new MockApi();
    const flow = new TestFlow(api);
    await flow.start();
    expect(flow.state.sessionId).toBe("fake-session");
    expect(flow.state.phase).toBe("testing");
    expect(flow.state.plateIndex).toBe(0);
    expect(flow.state.plateTotal).toBe(3);
    expect(flow.state.plateSvg).toContain('data-plate="0"');
  });

  it("renders the plate SVG verbatim", async () => {
    const api = new MockApi();
    const flow = new TestFlow(api);
    await flow.start();
    expect(flow.state.plateSvg).toBe(api.plates[0].svg);
  });

  it("collects digits through the keypad only", async () => {
    const api = new MockApi();
    const flow = new TestFlow(api);
    await flow.start();
    flow.pressDigit("4");
    flow.pressDigit("x"); // rejected
    flow.pressDigit("2");
    flow.pressDigit("9"); // over the 2-digit cap
    expect(flow.state.entry).toBe("42");
    flow.clearEntry();
    expect(flow.state.entry).toBe("");
  });

  it("submits typed digits and advances", async () => {
    const api = new MockApi();
    const flow = new TestFlow(api);
    await flow.start();
    flow.pressDigit("7");
    await flow.submitEntry();
    expect(api.answers).toEqual(["7"]);
    expect(flow.state.plateIndex).toBe(1);
    expect(flow.state.plateSvg).toContain('data-plate="1"');
    expect(flow.state.entry).toBe("");
  });

  it("the nothing button posts an empty answer", async () => {
    const api = new MockApi();
    const flow = new TestFlow(api);
    await flow.start();
    await flow.submitNothing();
    expect(api.answers).toEqual([""]);
  });

  it("completes the battery and shows the classification", async () => {
    const api = new MockApi(3);
    const flow = new TestFlow(api);
    await flow.start();
    await flow.submitNothing();
    await flow.submitNothing();
    await flow.submitNothing();
    expect(flow.state.phase).toBe("result");
    expect(flow.state.classification?.kind).toBe("deutan");
    expect(flow.state.adaptation?.adapted.name).toBe("default");
    expect(flow.state.answers).toHaveLength(3);
  });

  it("keeps entered digits and offers retry on network failure", async () => {
    const api = new MockApi();
    const flow = new TestFlow(api);
    await flow.start();
    flow.pressDigit("5");
    api.failNext = true;
    await flow.submitEntry();
    expect(flow.state.error).toContain("network down");
    expect(flow.state.entry).toBe("5"); // preserved, nothing submitted
    expect(api.answers).toEqual([]);
    await flow.retry();
    expect(flow.state.error).toBeNull();
    expect(api.answers).toEqual(["5"]);
    expect(flow.state.plateIndex).toBe(1);
  });

  it("resumes at the server cursor after a refresh", async () => {
    const api = new MockApi();
    api.cursor = 2; // server already saw two answers
    const flow = new TestFlow(api);
    await flow.start("fake-session");
    expect(flow.state.plateIndex).toBe(2);
    expect(flow.state.phase).toBe("testing");
  });

  it("resumes straight to the result when the session is complete", async () => {
    const api = new MockApi();
    api.cursor = 3;
    const flow = new TestFlow(api);
    await flow.start("fake-session");
    expect(flow.state.phase).toBe("result");
    expect(flow.state.classification?.kind).toBe("deutan");
  });

  it("moves between result and preview phases", async () => {
    const api = new MockApi(1);
    const flow = new TestFlow(api);
    await flow.start();
    await flow.submitNothing();
    flow.showPreview();
    expect(flow.state.phase).toBe("preview");
    flow.backToResult();
    expect(flow.state.phase).toBe("result");
  });
});

describe("formatting", () => {
  it("formats severity as a percentage", () => {
    expect(severityPercent(0.75)).toBe("75%");
    expect(severityPercent(0)).toBe("0%");
    expect(severityPercent(1)).toBe("100%");
  });

  it("describes every classification kind", () => {
    for (const kind of ["normal", "protan", "deutan", "tritan", "red_green_unspecified", "unclassified"]) {
      expect(describeKind(kind).length).toBeGreaterThan(0);
    }
  });
});

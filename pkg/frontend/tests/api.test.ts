import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, decodePoint, generateDesigns, getEmbedding, getTrajectory } from "../src/api";

function mockFetch(status: number, body: unknown) {
  const impl = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  }));
  vi.stubGlobal("fetch", impl);
  return impl;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("request shapes", () => {
  it("decode posts x, y, k", async () => {
    const impl = mockFetch(200, { params: {}, feasibility: { ok: true, checks: [] } });
    await decodePoint(1.5, -2.25, 7);
    const [path, init] = impl.mock.calls[0] as unknown as [string, RequestInit];
    expect(path).toBe("/api/decode");
    expect(JSON.parse(init.body as string)).toEqual({ x: 1.5, y: -2.25, k: 7 });
  });

  it("generate posts n and seed", async () => {
    const impl = mockFetch(200, { designs: [], d_new: 0 });
    await generateDesigns(50, 9);
    const [, init] = impl.mock.calls[0] as unknown as [string, RequestInit];
    expect(JSON.parse(init.body as string)).toEqual({ n: 50, seed: 9 });
  });

  it("trajectory encodes the pressure query", async () => {
    const impl = mockFetch(200, { pressure_kpa: 0, mode: "Degenerate", tip_displacement_mm: 0, points: [] });
    await getTrajectory(12, 42.5);
    const [path] = impl.mock.calls[0] as unknown as [string];
    expect(path).toBe("/api/design/12/trajectory?pressure=42.5");
  });

  it("embedding unwraps the rows envelope", async () => {
    const rows = [{ id: 0, dim1: 1, dim2: 2, mode: "Bending" }];
    mockFetch(200, { rows });
    expect(await getEmbedding()).toEqual(rows);
  });
});

describe("error mapping", () => {
  it("carries the status and detail", async () => {
    mockFetch(404, { detail: "no design with id 99" });
    await expect(getTrajectory(99, 10)).rejects.toMatchObject({
      status: 404,
      message: "no design with id 99",
    });
  });

  it("flags 409 as a stale work directory", async () => {
    mockFetch(409, { detail: "missing artifact" });
    const err = await getEmbedding().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).staleWorkdir).toBe(true);
  });

  it("flags field-level 422 details", async () => {
    mockFetch(422, { detail: [{ loc: ["body", "x"], msg: "not a number" }] });
    const err = (await decodePoint(0, 0).catch((e: unknown) => e)) as ApiError;
    expect(err.status).toBe(422);
    expect(err.message).toContain("x");
  });
});

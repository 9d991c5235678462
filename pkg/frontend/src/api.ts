// Typed client over the screening service's HTTP API. The UI is a thin
// shell: every state transition below is driven by a server response.

export interface PaletteColorDto {
  role: string;
  srgb: string;
  pinned: boolean;
}

export interface PaletteDto {
  name: string;
  colors: PaletteColorDto[];
}

export interface PlateOutcomeDto {
  plate_id: string;
  expected: string;
  given: string;
  correct: boolean;
}

export interface ClassificationDto {
  kind: string;
  severity: number;
  confidence: number;
  per_plate: PlateOutcomeDto[];
}

export interface AdaptationDto {
  adapted: PaletteDto;
  retest_recommended: boolean;
  scheme_index: number | null;
  scheme_name: string;
  initial_score: number | null;
  final_score: number | null;
  iterations: number;
  objective_trace: number[];
}

export interface SessionCreatedDto {
  session_id: string;
  plate_count: number;
  first_plate_id: string;
}

export interface PlateDto {
  svg: string;
  plateId: string;
  index: number;
  total: number;
}

export interface SubmitResultDto {
  done: boolean;
  next_plate_id?: string;
  result_ready?: boolean;
}

export interface ResultDto {
  classification: ClassificationDto;
  adaptation: AdaptationDto | null;
}

export interface ApiClient {
  createSession(): Promise<SessionCreatedDto>;
  fetchPlate(sessionId: string): Promise<PlateDto>;
  submitAnswer(sessionId: string, answer: string): Promise<SubmitResultDto>;
  fetchResult(sessionId: string): Promise<ResultDto>;
  fetchDefaultPalette(): Promise<PaletteDto>;
  simulateHex(hex: string, kind: string, severity: number): Promise<string>;
}

export class HttpError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function expectOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    throw new HttpError(resp.status, `${resp.status} ${await resp.text()}`);
  }
  return resp;
}

export class HttpApiClient implements ApiClient {
  constructor(private baseUrl: string = "") {}

  async createSession(): Promise<SessionCreatedDto> {
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/api/sessions`, { method: "POST" }),
    );
    return resp.json();
  }

  async fetchPlate(sessionId: string): Promise<PlateDto> {
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/api/sessions/${sessionId}/plate`),
    );
    return {
      svg: await resp.text(),
      plateId: resp.headers.get("x-plate-id") ?? "",
      index: Number(resp.headers.get("x-plate-index") ?? "0"),
      total: Number(resp.headers.get("x-plate-total") ?? "0"),
    };
  }

  async submitAnswer(sessionId: string, answer: string): Promise<SubmitResultDto> {
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/api/sessions/${sessionId}/response`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ answer }),
      }),
    );
    return resp.json();
  }

  async fetchResult(sessionId: string): Promise<ResultDto> {
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/api/sessions/${sessionId}/result`),
    );
    return resp.json();
  }

  async fetchDefaultPalette(): Promise<PaletteDto> {
    const resp = await expectOk(await fetch(`${this.baseUrl}/api/palette`));
    return resp.json();
  }

  async simulateHex(hex: string, kind: string, severity: number): Promise<string> {
    const clean = hex.replace(/^#/, "");
    const params = new URLSearchParams({
      hex: clean,
      kind,
      severity: String(severity),
    });
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/api/simulate?${params}`),
    );
    const body = await resp.json();
    return `#${body.hex}`;
  }
}

// Test-taking state machine. The server owns the session; this class only
// mirrors it, so a page refresh resumes wherever the server's cursor is.

import {
  AdaptationDto,
  ApiClient,
  ClassificationDto,
  HttpError,
  PlateDto,
} from "./api.js";

export type Phase = "testing" | "result" | "preview";

export interface UiSessionState {
  sessionId: string | null;
  phase: Phase;
  plateSvg: string;
  currentPlateId: string;
  plateIndex: number;
  plateTotal: number;
  entry: string;
  answers: string[];
  classification: ClassificationDto | null;
  adaptation: AdaptationDto | null;
  busy: boolean;
  error: string | null;
}

const MAX_ANSWER_DIGITS = 2;

function initialState(): UiSessionState {
  return {
    sessionId: null,
    phase: "testing",
    plateSvg: "",
    currentPlateId: "",
    plateIndex: 0,
    plateTotal: 0,
    entry: "",
    answers: [],
    classification: null,
    adaptation: null,
    busy: false,
    error: null,
  };
}

export class TestFlow {
  state: UiSessionState = initialState();
  private retryAction: (() => Promise<void>) | null = null;

  constructor(
    private api: ApiClient,
    private onChange: (state: UiSessionState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  /** Create a session, or re-attach to one after a refresh. */
  async start(existingSessionId?: string): Promise<void> {
    await this.guarded(async () => {
      if (existingSessionId) {
        this.state.sessionId = existingSessionId;
        await this.loadPlateOrResult();
        return;
      }
      const created = await this.api.createSession();
      this.state.sessionId = created.session_id;
      this.state.plateTotal = created.plate_count;
      await this.loadPlate();
    });
  }

  pressDigit(digit: string): void {
    if (this.state.busy || this.state.phase !== "testing") return;
    if (!/^[0-9]$/.test(digit)) return;
    if (this.state.entry.length >= MAX_ANSWER_DIGITS) return;
    this.state.entry += digit;
    this.emit();
  }

  clearEntry(): void {
    if (this.state.busy) return;
    this.state.entry = "";
    this.emit();
  }

  /** Submit the typed digits (may be empty, meaning nothing was seen). */
  async submitEntry(): Promise<void> {
    const answer = this.state.entry;
    await this.submitAnswer(answer);
  }

  /** The dedicated "I see nothing" button posts an empty answer. */
  async submitNothing(): Promise<void> {
    await this.submitAnswer("");
  }

  private async submitAnswer(answer: string): Promise<void> {
    if (this.state.phase !== "testing" || this.state.sessionId === null) return;
    await this.guarded(async () => {
      const sid = this.state.sessionId!;
      const outcome = await this.api.submitAnswer(sid, answer);
      this.state.answers.push(answer);
      this.state.entry = "";
      if (outcome.done) {
        await this.finish();
      } else {
        await this.loadPlate();
      }
    });
  }

  /** Re-run the operation that failed on the network. Entered digits stay. */
  async retry(): Promise<void> {
    const action = this.retryAction;
    if (action === null) return;
    await this.guarded(action);
  }

  private async loadPlateOrResult(): Promise<void> {
    try {
      await this.loadPlate();
    } catch (err) {
      if (err instanceof HttpError && err.status === 409) {
        await this.finish(); // session already complete on the server
        return;
      }
      throw err;
    }
  }

  private async loadPlate(): Promise<void> {
    const sid = this.state.sessionId!;
    const plate: PlateDto = await this.api.fetchPlate(sid);
    this.state.plateSvg = plate.svg; // rendered verbatim, never recolored
    this.state.currentPlateId = plate.plateId;
    this.state.plateIndex = plate.index;
    this.state.plateTotal = plate.total;
    this.state.phase = "testing";
  }

  private async finish(): Promise<void> {
    const sid = this.state.sessionId!;
    const result = await this.api.fetchResult(sid);
    this.state.classification = result.classification;
    this.state.adaptation = result.adaptation;
    this.state.phase = "result";
  }

  showPreview(): void {
    if (this.state.phase === "result" && this.state.adaptation !== null) {
      this.state.phase = "preview";
      this.emit();
    }
  }

  backToResult(): void {
    if (this.state.phase === "preview") {
      this.state.phase = "result";
      this.emit();
    }
  }

  private async guarded(action: () => Promise<void>): Promise<void> {
    this.state.busy = true;
    this.state.error = null;
    this.emit();
    try {
      await action();
      this.retryAction = null;
    } catch (err) {
      // keep entered state; surface a retry prompt
      this.state.error = err instanceof Error ? err.message : String(err);
      this.retryAction = action;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }
}

export function severityPercent(severity: number): string {
  return `${Math.round(severity * 100)}%`;
}

export function describeKind(kind: string): string {
  switch (kind) {
    case "normal":
      return "Normal color vision";
    case "protan":
      return "Protan (red-weak) deficiency";
    case "deutan":
      return "Deutan (green-weak) deficiency";
    case "tritan":
      return "Tritan (blue-yellow) deficiency";
    case "red_green_unspecified":
      return "Red-green deficiency (subtype unclear)";
    default:
      return "Could not classify — please retake the test";
  }
}

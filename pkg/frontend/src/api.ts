// Typed client for the stagecut service; the UI talks to nothing else.

import type {
  FrameRectsResponse,
  ProjectSummary,
  TimelinePayload,
} from './types.js';

export class ServiceError extends Error {
  constructor(
    readonly stage: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ServiceError> {
  let stage = 'service';
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body === 'object') {
      stage = body.stage ?? stage;
      message = body.message ?? JSON.stringify(body);
    }
  } catch {
    // non-JSON error body: keep the status line
  }
  return new ServiceError(stage, message, response.status);
}

export class ServiceClient {
  constructor(readonly baseUrl: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  registerProject(path: string): Promise<{ project_id: string }> {
    return this.request('/projects', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ path }),
    });
  }

  getProject(projectId: string): Promise<ProjectSummary> {
    return this.request(`/projects/${projectId}`);
  }

  solve(
    projectId: string,
    overrides: Record<string, number>,
    stride = 25,
  ): Promise<TimelinePayload> {
    return this.request(`/projects/${projectId}/solve`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ overrides, stride }),
    });
  }

  frameRects(projectId: string, frame: number): Promise<FrameRectsResponse> {
    return this.request(`/projects/${projectId}/frames/${frame}/rects`);
  }
}

import { afterEach, describe, expect, it, vi } from 'vitest';

import { ServiceClient, ServiceError } from '../src/api.js';
import { fixturePayload } from './fixtures.js';

afterEach(() => vi.unstubAllGlobals());

describe('ServiceClient', () => {
  it('posts solve requests and returns the payload', async () => {
    const payload = fixturePayload();
    const fetchMock = vi.fn(async () =>
      new Response(JSON.stringify(payload), { status: 200 }),
    );
    vi.stubGlobal('fetch', fetchMock);
    const client = new ServiceClient('http://svc');
    const result = await client.solve('p1', { m: 3 }, 10);
    expect(result.total_energy).toBeCloseTo(payload.total_energy);
    const [url, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(url).toBe('http://svc/projects/p1/solve');
    expect(JSON.parse(String(init.body))).toEqual({ overrides: { m: 3 }, stride: 10 });
  });

  it('surfaces service errors with their stage', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn(async () =>
        new Response(
          JSON.stringify({ stage: 'params', message: 'alpha must stay below beta' }),
          { status: 422 },
        ),
      ),
    );
    const client = new ServiceClient('');
    const failure = client.solve('p1', { alpha: 0.9 });
    await expect(failure).rejects.toBeInstanceOf(ServiceError);
    await expect(failure).rejects.toMatchObject({
      stage: 'params',
      status: 422,
    });
  });

  it('keeps the status line for non-JSON errors', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn(async () => new Response('boom', { status: 500, statusText: 'Server Error' })),
    );
    const client = new ServiceClient('');
    await expect(client.getProject('x')).rejects.toMatchObject({
      stage: 'service',
      status: 500,
    });
  });
});

import os
import time

import requests

API_URL = os.getenv("THREEJ_API_URL", "http://localhost:8000")


def verify():
    print("Verifying a running screens service...")
    try:
        health = requests.get(f"{API_URL}/health", timeout=10)
        if health.status_code != 200:
            print("❌ API is not healthy")
            return False

        resp = requests.post(f"{API_URL}/eval", json={"entries": ["1", "1", "2", "0", "0", "0"]}, timeout=10)
        if resp.status_code != 200:
            print(f"❌ Eval failed: {resp.text}")
            return False
        exact = resp.json()["three_j"]["exact"]
        if exact != "+sqrt(2/15)":
            print(f"❌ Unexpected (1,1,2;0,0,0) = {exact}")
            return False
        print(f"✓ (1,1,2;0,0,0) = {exact}")

        resp = requests.post(f"{API_URL}/screens", json={"a": "2", "b": "2", "sigma": "1", "formats": ["csv"]},
                             timeout=10)
        if resp.status_code != 200:
            print(f"❌ Screen request failed: {resp.text}")
            return False
        job_id = resp.json()["job_id"]
        print(f"Started job {job_id}")

        for _ in range(30):
            status = requests.get(f"{API_URL}/status/{job_id}", timeout=10).json()
            if status["status"] in ("completed", "failed"):
                break
            time.sleep(1)

        if status["status"] == "completed":
            print(f"✅ SUCCESS: {status['message']}")
            return True
        print(f"❌ FAILURE: job ended as {status['status']}: {status.get('error')}")
        return False

    except requests.RequestException as e:
        print(f"Error: {e}")
        return False


if __name__ == "__main__":
    verify()
